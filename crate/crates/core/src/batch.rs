//! Pairwise matrices over collections.
//!
//! Only the lower triangle (diagonal included) is computed; the upper
//! triangle is a mirror copy, so the result is exactly symmetric.

/// A failed cell, with the pair that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct PairError<E> {
    pub i: usize,
    pub j: usize,
    pub error: E,
}

fn cells(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (0..=i).map(move |j| (i, j))).collect()
}

fn assemble<R: Clone, E>(
    k: usize,
    cells: &[(usize, usize)],
    results: Vec<Result<R, E>>,
) -> Result<Vec<Vec<R>>, PairError<E>> {
    let mut tri: Vec<Vec<R>> = (0..k).map(|i| Vec::with_capacity(i + 1)).collect();
    for (&(i, j), r) in cells.iter().zip(results) {
        match r {
            Ok(v) => tri[i].push(v),
            Err(error) => return Err(PairError { i, j, error }),
        }
    }
    Ok((0..k)
        .map(|i| (0..k).map(|j| if j <= i { tri[i][j].clone() } else { tri[j][i].clone() }).collect())
        .collect())
}

/// Sequential pairwise matrix. On failure, reports the first failing cell
/// in row-major order of the lower triangle.
pub fn pairwise_matrix_seq<T, R, E, F>(items: &[T], f: F) -> Result<Vec<Vec<R>>, PairError<E>>
where
    R: Clone,
    F: Fn(&T, &T) -> Result<R, E>,
{
    let cs = cells(items.len());
    let results = cs.iter().map(|&(i, j)| f(&items[i], &items[j])).collect();
    assemble(items.len(), &cs, results)
}

/// Pairwise matrix computed on the rayon pool; same output as
/// [`pairwise_matrix_seq`].
#[cfg(feature = "parallel")]
pub fn pairwise_matrix<T, R, E, F>(items: &[T], f: F) -> Result<Vec<Vec<R>>, PairError<E>>
where
    T: Sync,
    R: Clone + Send,
    E: Send,
    F: Fn(&T, &T) -> Result<R, E> + Sync,
{
    use rayon::prelude::*;
    let cs = cells(items.len());
    let results = cs.par_iter().map(|&(i, j)| f(&items[i], &items[j])).collect();
    assemble(items.len(), &cs, results)
}

#[cfg(not(feature = "parallel"))]
pub fn pairwise_matrix<T, R, E, F>(items: &[T], f: F) -> Result<Vec<Vec<R>>, PairError<E>>
where
    R: Clone,
    F: Fn(&T, &T) -> Result<R, E>,
{
    pairwise_matrix_seq(items, f)
}
