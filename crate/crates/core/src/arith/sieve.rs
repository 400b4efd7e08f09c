use super::ArithError;

/// Upper bound on a single sieve segment.
pub const MAX_SEGMENT_BYTES: usize = 64 << 20;
pub const DEFAULT_SEGMENT_BYTES: usize = 256 << 10;

/// Primes up to `n` with a plain odd-only sieve. Only used for the base
/// primes below `sqrt(hi)`, so `n` stays at most 2^32.
fn simple_primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    // index i represents 2i + 1
    let mut composite = vec![false; n / 2 + 1];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let q = 2 * i + 1;
            let mut j = q * q / 2;
            while j < composite.len() {
                composite[j] = true;
                j += q;
            }
        }
        i += 1;
    }
    let mut out = vec![2u64];
    out.extend(
        (1..composite.len())
            .filter(|&i| !composite[i] && 2 * i < n)
            .map(|i| (2 * i + 1) as u64),
    );
    out
}

/// Segmented sieve of Eratosthenes over odd numbers, one byte per odd.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    segment_bytes: usize,
}

impl Default for SegmentedSieve {
    fn default() -> Self {
        SegmentedSieve {
            segment_bytes: DEFAULT_SEGMENT_BYTES,
        }
    }
}

impl SegmentedSieve {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_segment_bytes(segment_bytes: usize) -> Result<Self, ArithError> {
        if segment_bytes == 0 || segment_bytes > MAX_SEGMENT_BYTES {
            return Err(ArithError::SegmentSize(segment_bytes));
        }
        Ok(SegmentedSieve { segment_bytes })
    }

    pub fn segment_bytes(&self) -> usize {
        self.segment_bytes
    }

    /// Calls `f` with the primes of `[lo, hi]`, one ascending chunk per segment.
    pub fn for_each_chunk<F>(&self, lo: u64, hi: u64, mut f: F) -> Result<(), ArithError>
    where
        F: FnMut(&[u64]),
    {
        self.run(lo, hi, &mut f)
    }

    fn run(&self, lo: u64, hi: u64, f: &mut dyn FnMut(&[u64])) -> Result<(), ArithError> {
        if lo > hi {
            return Err(ArithError::EmptyRange { lo, hi });
        }
        let mut chunk = Vec::new();
        if lo <= 2 && 2 <= hi {
            f(&[2]);
        }
        // first odd >= max(lo, 3)
        let mut start = lo.max(3) | 1;
        if start < lo.max(3) || start > hi {
            return Ok(());
        }
        let root = hi.isqrt();
        // Up to 2^24 the base primes are kept; beyond that they are
        // regenerated per segment so memory stays at one segment.
        let stored = (root <= STORED_BASE_LIMIT).then(|| simple_primes_upto(root));
        let span = 2 * self.segment_bytes as u64;
        let mut marks = vec![false; self.segment_bytes];
        loop {
            // segment covers the odds start, start+2, ..., end (inclusive)
            let end = start.saturating_add(span - 2).min(hi);
            let count = ((end - start) / 2 + 1) as usize;
            let marks = &mut marks[..count];
            marks.fill(false);
            match &stored {
                Some(base) => cross_off(marks, start, end, base),
                None => {
                    let seg_root = end.isqrt();
                    SegmentedSieve::default().run(3, seg_root, &mut |base| {
                        cross_off(marks, start, end, base)
                    })?;
                }
            }
            chunk.clear();
            chunk.extend(
                marks
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| !m)
                    .map(|(i, _)| start + 2 * i as u64),
            );
            if !chunk.is_empty() {
                f(&chunk);
            }
            if end >= hi || end.checked_add(2).is_none() {
                break;
            }
            start = end + 2;
        }
        Ok(())
    }

    pub fn primes(&self, lo: u64, hi: u64) -> Result<Vec<u64>, ArithError> {
        let mut out = Vec::new();
        self.for_each_chunk(lo, hi, |c| out.extend_from_slice(c))?;
        Ok(out)
    }
}

const STORED_BASE_LIMIT: u64 = 1 << 24;

/// Marks odd multiples of each odd base prime inside `[start, end]`;
/// `marks[i]` stands for `start + 2i`.
fn cross_off(marks: &mut [bool], start: u64, end: u64, base: &[u64]) {
    let count = marks.len();
    for &q in base {
        if q == 2 {
            continue;
        }
        let qq = match q.checked_mul(q) {
            Some(v) if v <= end => v,
            _ => break,
        };
        // u128 so the first multiple past `start` cannot wrap near 2^64
        let mut first = if qq >= start {
            qq as u128
        } else {
            (start as u128).div_ceil(q as u128) * q as u128
        };
        if first % 2 == 0 {
            first += q as u128;
        }
        if first > end as u128 {
            continue;
        }
        let mut j = ((first - start as u128) / 2) as usize;
        while j < count {
            marks[j] = true;
            j += q as usize;
        }
    }
}

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in_range(lo: u64, hi: u64) -> Result<Vec<u64>, ArithError> {
    SegmentedSieve::default().primes(lo, hi)
}

/// All primes up to `n`.
pub fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    primes_in_range(2, n).expect("2 <= n")
}
