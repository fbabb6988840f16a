use crate::csng::{symmetrize, Csng};
use crate::{Error, Result};

/// Modularity of an assignment with resolution `resolution`:
///
/// `M = Σ_c [ Σ_in(c) / 2W − γ (Σ_tot(c) / 2W)² ]`
///
/// where `Σ_in(c)` sums the adjacency entries inside `c` (both directions),
/// `Σ_tot(c)` the weighted degrees of its nodes and `W` the total edge
/// weight. Directed graphs are symmetrized first.
pub fn modularity(g: &Csng, assignment: &[usize], resolution: f64) -> Result<f64> {
    if assignment.len() != g.n_nodes() {
        return Err(Error::LengthMismatch {
            expected: g.n_nodes(),
            got: assignment.len(),
        });
    }
    let owned;
    let g = if g.is_directed() {
        owned = symmetrize(g);
        &owned
    } else {
        g
    };
    let two_w: f64 = (0..g.n_nodes()).map(|i| g.weighted_degree(i)).sum();
    if two_w <= 0.0 {
        return Err(Error::DegenerateGraph);
    }
    let n_comm = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut inside = vec![0.0; n_comm];
    let mut total = vec![0.0; n_comm];
    for (i, j, w, _) in g.entries() {
        let c = assignment[i];
        total[c] += w;
        if assignment[j] == c {
            inside[c] += w;
        }
    }
    Ok(inside
        .iter()
        .zip(&total)
        .map(|(&si, &st)| si / two_w - resolution * (st / two_w) * (st / two_w))
        .sum())
}
