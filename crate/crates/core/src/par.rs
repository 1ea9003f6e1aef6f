//! Data-parallel helpers. With the `parallel` feature and
//! [`ExecMode::Parallel`] the maps run on rayon; otherwise they are plain
//! sequential iterators. Both paths produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Element count below which element-wise loops stay sequential.
#[cfg(feature = "parallel")]
const MIN_PAR_LEN: usize = 2048;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// Whether this build can honour `Parallel`.
    pub fn available(self) -> bool {
        match self {
            ExecMode::Sequential => true,
            ExecMode::Parallel => cfg!(feature = "parallel"),
        }
    }

    #[cfg(feature = "parallel")]
    fn par(self) -> bool {
        self == ExecMode::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, U, F>(mode: ExecMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.par() && items.len() > 1 {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<U, F>(mode: ExecMode, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.par() && n > 1 {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Element-wise map for long vectors; short ones stay sequential.
pub fn map_elems<U, F>(mode: ExecMode, len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.par() && len >= MIN_PAR_LEN {
        return (0..len).into_par_iter().with_min_len(512).map(f).collect();
    }
    let _ = mode;
    (0..len).map(f).collect()
}
