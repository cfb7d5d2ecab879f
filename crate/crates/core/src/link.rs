//! Planar link patterns: `m` nested arcs among `n` boundary points, the
//! remaining `n - 2m` points joined to the marked point by rays.
//!
//! Indices are 0-based in the API and 1-based in the `Display` form.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkPattern {
    /// Index pairs `(i, j)` with `i < j`, sorted by `i`.
    pub arcs: Vec<(usize, usize)>,
    /// Indices connected to the marked point, ascending.
    pub rays: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinkError {
    #[error("point {0} is used more than once or is out of range")]
    NotAPartition(usize),
    #[error("point {0} is not connected")]
    Unconnected(usize),
    #[error("arcs {0:?} and {1:?} cross")]
    Crossing((usize, usize), (usize, usize)),
    #[error("ray from {0} crosses arc {1:?}")]
    RayUnderArc(usize, (usize, usize)),
}

impl LinkPattern {
    /// Normalizes index order, then checks the pattern invariants.
    pub fn new(arcs: Vec<(usize, usize)>, rays: Vec<usize>, n: usize) -> Result<Self, LinkError> {
        let mut arcs: Vec<(usize, usize)> = arcs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        let mut rays = rays;
        arcs.sort();
        rays.sort();
        let p = LinkPattern { arcs, rays };
        p.validate(n)?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        2 * self.arcs.len() + self.rays.len()
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn validate(&self, n: usize) -> Result<(), LinkError> {
        let mut seen = vec![false; n];
        let ends = self.arcs.iter().flat_map(|&(a, b)| [a, b]).chain(self.rays.iter().copied());
        for i in ends {
            if i >= n || seen[i] {
                return Err(LinkError::NotAPartition(i));
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(LinkError::Unconnected(i));
        }
        for (k, &(a, b)) in self.arcs.iter().enumerate() {
            for &(c, d) in &self.arcs[k + 1..] {
                let c_inside = a < c && c < b;
                let d_inside = a < d && d < b;
                if c_inside != d_inside {
                    return Err(LinkError::Crossing((a, b), (c, d)));
                }
            }
            if let Some(&r) = self.rays.iter().find(|&&r| a < r && r < b) {
                return Err(LinkError::RayUnderArc(r, (a, b)));
            }
        }
        Ok(())
    }

    /// Pattern seen after reversing the boundary order.
    pub fn mirrored(&self, n: usize) -> LinkPattern {
        let arcs = self.arcs.iter().map(|&(a, b)| (n - 1 - b, n - 1 - a)).collect();
        let rays = self.rays.iter().map(|&r| n - 1 - r).collect();
        LinkPattern::new(arcs, rays, n).expect("mirror of a valid pattern is valid")
    }

    /// Partner of point `i`: `Some(j)` for an arc, `None` for a ray.
    pub fn partner(&self, i: usize) -> Option<usize> {
        self.arcs.iter().find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }
}

impl fmt::Display for LinkPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<String> = self.arcs.iter().map(|(a, b)| format!("({},{})", a + 1, b + 1)).collect();
        let rays: Vec<String> = self.rays.iter().map(|r| (r + 1).to_string()).collect();
        write!(f, "arcs {{{}}} rays {{{}}}", arcs.join(" "), rays.join(" "))
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `C(n, m) - C(n, m - 1)`, the number of `(n, m)` link patterns.
pub fn ballot_number(n: usize, m: usize) -> u128 {
    if 2 * m > n {
        return 0;
    }
    let lower = if m == 0 { 0 } else { binomial(n, m - 1) };
    binomial(n, m) - lower
}

/// All `(n, m)` link patterns, in lexicographic order of the arc list.
pub fn enumerate_link_patterns(n: usize, m: usize) -> Vec<LinkPattern> {
    let mut out = Vec::new();
    if 2 * m > n {
        return out;
    }
    let mut stack = Vec::new();
    let mut arcs = Vec::new();
    let mut rays = Vec::new();
    backtrack(0, n, m, &mut stack, &mut arcs, &mut rays, &mut out);
    out.sort();
    out
}

fn backtrack(
    i: usize,
    n: usize,
    m: usize,
    stack: &mut Vec<usize>,
    arcs: &mut Vec<(usize, usize)>,
    rays: &mut Vec<usize>,
    out: &mut Vec<LinkPattern>,
) {
    let remaining = n - i;
    if remaining < stack.len() {
        return;
    }
    if i == n {
        if stack.is_empty() && arcs.len() == m {
            let mut a = arcs.clone();
            a.sort();
            out.push(LinkPattern { arcs: a, rays: rays.clone() });
        }
        return;
    }
    if let Some(open) = stack.pop() {
        arcs.push((open, i));
        backtrack(i + 1, n, m, stack, arcs, rays, out);
        arcs.pop();
        stack.push(open);
    }
    if arcs.len() + stack.len() < m {
        stack.push(i);
        backtrack(i + 1, n, m, stack, arcs, rays, out);
        stack.pop();
    }
    if stack.is_empty() && rays.len() < n - 2 * m {
        rays.push(i);
        backtrack(i + 1, n, m, stack, arcs, rays, out);
        rays.pop();
    }
}
