// Order-preserving flat map, parallel when the `parallel` feature is on.

#[cfg(feature = "parallel")]
pub(crate) fn flat_map<T, V, F>(items: &[T], f: F) -> Vec<V>
where
    T: Sync,
    V: Send,
    F: Fn(&T) -> Vec<V> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().flat_map_iter(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn flat_map<T, V, F>(items: &[T], f: F) -> Vec<V>
where
    F: Fn(&T) -> Vec<V>,
{
    items.iter().flat_map(f).collect()
}
