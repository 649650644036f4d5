//! Row-parallel helpers: rayon under `std`, plain loops otherwise. Each output
//! element is computed independently, so results do not depend on scheduling.

#[cfg(feature = "std")]
pub(crate) fn for_each_row<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    use rayon::prelude::*;
    out.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
}

#[cfg(not(feature = "std"))]
pub(crate) fn for_each_row<T, F>(out: &mut [T], f: F)
where
    F: Fn(usize, &mut T),
{
    out.iter_mut().enumerate().for_each(|(i, v)| f(i, v));
}

#[cfg(feature = "std")]
pub(crate) fn for_each_chunk<T, F>(out: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    use rayon::prelude::*;
    out.par_chunks_mut(chunk)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

#[cfg(not(feature = "std"))]
pub(crate) fn for_each_chunk<T, F>(out: &mut [T], chunk: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    out.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}
