//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it, or with [`Parallelism::Sequential`], they run in order.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Maps then flattens, preserving order.
pub fn flat_map<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Vec<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().flat_map_iter(f).collect();
    }
    let _ = mode;
    items.iter().flat_map(f).collect()
}

/// Finds the first index (in order) whose item satisfies `f`.
pub fn position_first<T, F>(mode: Parallelism, items: &[T], f: F) -> Option<usize>
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().position_first(f);
    }
    let _ = mode;
    items.iter().position(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        for mode in [Parallelism::Sequential, Parallelism::Parallel] {
            assert_eq!(map(mode, &xs, |x| x * x)[999], 999 * 999);
            assert_eq!(
                flat_map(mode, &xs[..3], |&x| vec![x; x as usize]),
                vec![1, 2, 2]
            );
            assert_eq!(
                position_first(mode, &xs, |&x| x > 500 && x % 7 == 0),
                Some(504)
            );
        }
    }
}
