//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it they fall back to plain iterators with identical results.

#[cfg(feature = "parallel")]
#[doc(hidden)]
pub use rayon as __rayon;

/// Maps `f` over a slice, preserving order.
#[macro_export]
macro_rules! par_map {
    ($slice: expr, $f: expr) => {{
        #[cfg(feature = "parallel")]
        {
            use $crate::par::__rayon::iter::{IntoParallelRefIterator as _, ParallelIterator as _};
            $slice.par_iter().map($f).collect::<Vec<_>>()
        }

        #[cfg(not(feature = "parallel"))]
        {
            $slice.iter().map($f).collect::<Vec<_>>()
        }
    }};
}

/// Maps `f` over a range, preserving order.
#[macro_export]
macro_rules! par_map_range {
    ($range: expr, $f: expr) => {{
        #[cfg(feature = "parallel")]
        {
            use $crate::par::__rayon::iter::{IntoParallelIterator as _, ParallelIterator as _};
            ($range).into_par_iter().map($f).collect::<Vec<_>>()
        }

        #[cfg(not(feature = "parallel"))]
        {
            ($range).map($f).collect::<Vec<_>>()
        }
    }};
}

/// First `Some` result in index order. Work is done in chunks so that a hit
/// early in the sequence stops the search without making the answer depend
/// on scheduling.
pub fn find_first<T, R, F>(items: &[T], chunk: usize, f: F) -> Option<(usize, R)>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Option<R> + Sync,
{
    let chunk = chunk.max(1);
    let mut start = 0;
    while start < items.len() {
        let end = (start + chunk).min(items.len());
        let idx: Vec<usize> = (start..end).collect();
        let results = par_map!(idx, |&i| f(i, &items[i]));
        if let Some((off, r)) = results.into_iter().enumerate().find_map(|(o, r)| r.map(|r| (o, r))) {
            return Some((start + off, r));
        }
        start = end;
    }
    None
}

/// Chunk size that keeps every worker busy.
pub fn default_chunk() -> usize {
    #[cfg(feature = "parallel")]
    {
        4 * rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        16
    }
}

/// Sizes the global worker pool. Only the first call has an effect; returns
/// whether this call configured the pool.
pub fn set_jobs(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_first_is_leftmost() {
        let v: Vec<u32> = (0..100).collect();
        let hit = find_first(&v, 7, |_, &x| (x % 13 == 12).then_some(x * 2));
        assert_eq!(hit, Some((12, 24)));
        assert_eq!(find_first(&v, 3, |_, &x| (x > 1000).then_some(x)), None);
    }

    #[test]
    fn maps_preserve_order() {
        let v = vec![3, 1, 2];
        assert_eq!(par_map!(v, |x| x * 10), vec![30, 10, 20]);
        assert_eq!(par_map_range!(0..4usize, |i| i * i), vec![0, 1, 4, 9]);
    }
}
