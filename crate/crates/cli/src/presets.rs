//! Built-in disk scenarios with `u = -1`, each with the link pattern its
//! published caption names. Indices are 1-based in the order the points are
//! listed, which is not the canonical boundary order.

use std::f64::consts::PI;

use sle0::config::{unit, Point, Uniformization};
use sle0::C64;

use crate::scenario::Scenario;

pub struct Preset {
    pub id: &'static str,
    pub listed: Vec<C64>,
    /// Charges as printed. Underscreened presets are solved and the solution
    /// closest to these is used; the rest use them directly.
    pub printed_xi: Vec<C64>,
    /// Caption pattern as (arcs, rays), or `None` when the caption cannot
    /// describe a pattern on the listed points.
    pub caption: Option<(Vec<(usize, usize)>, Vec<usize>)>,
    pub notes: Vec<&'static str>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rays(r: &[usize]) -> Option<(Vec<(usize, usize)>, Vec<usize>)> {
    Some((vec![], r.to_vec()))
}

fn arcs(a: &[(usize, usize)], r: &[usize]) -> Option<(Vec<(usize, usize)>, Vec<usize>)> {
    Some((a.to_vec(), r.to_vec()))
}

pub const IDS: [&str; 15] =
    ["4.1", "4.2", "4.3", "4.4", "4.5", "4.6", "4.7", "4.8", "4.9", "4.10", "4.11", "4.12", "4.13", "4.14", "4.15"];

pub fn preset(id: &str) -> Option<Preset> {
    let four = vec![c(0.0, 1.0), unit(PI / 4.0), unit(-PI / 4.0), c(0.0, -1.0)];
    let three = vec![c(0.0, 1.0), c(1.0, 0.0), c(0.0, -1.0)];
    let pair4 = vec![unit(PI / 4.0), unit(-PI / 4.0)];
    let pair3 = vec![unit(PI / 3.0), unit(-PI / 3.0)];
    let s = (2.0f64.sqrt() + 2.0).sqrt();
    let tilted = c(1.0, 2.0 * s) / (2.0 * 2.0f64.sqrt() + 1.0);
    let r3 = 3.0f64.sqrt();
    let p = |listed: Vec<C64>, printed_xi: Vec<C64>, caption, notes: Vec<&'static str>| Preset {
        id: IDS.iter().find(|&&k| k == id).copied().unwrap_or(""),
        listed,
        printed_xi,
        caption,
        notes,
    };
    Some(match id {
        "4.1" => p(vec![c(1.0, 0.0)], vec![], rays(&[1]), vec![]),
        "4.2" => p(pair4.clone(), vec![], rays(&[1, 2]), vec![]),
        "4.3" => p(pair4, vec![c(1.0, 0.0)], arcs(&[(1, 2)], &[]), vec![]),
        "4.4" => p(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)], vec![], rays(&[1, 2, 3]), vec![]),
        "4.5" => p(
            three.clone(),
            vec![unit(PI / 3.0)],
            arcs(&[(1, 2)], &[3]),
            vec!["caption states n = 4 but lists three growth points"],
        ),
        "4.6" => p(
            three,
            vec![unit(-PI / 3.0)],
            arcs(&[(2, 3)], &[1]),
            vec!["caption states n = 4 but lists three growth points"],
        ),
        "4.7" => p(four.clone(), vec![], rays(&[1, 2, 3, 4]), vec![]),
        "4.8" => p(
            four,
            vec![c(1.0, 0.0)],
            arcs(&[(2, 3)], &[1, 4]),
            vec![
                "caption states m = 2 but lists one charge",
                "sub-caption lists x_k = exp((2k+1) pi i/4), which differs from the text; the text points are used",
            ],
        ),
        "4.9" => p(
            four,
            vec![tilted],
            arcs(&[(1, 2)], &[3, 4]),
            vec!["caption states m = 2 but lists one charge"],
        ),
        "4.10" => p(
            four,
            vec![tilted.conj()],
            arcs(&[(3, 4)], &[1, 2]),
            vec!["caption states m = 2 but lists one charge"],
        ),
        "4.11" => p(four, vec![c(0.49604, 0.0), c(2.0160, 0.0)], arcs(&[(1, 4), (2, 3)], &[]), vec![]),
        "4.12" => p(four, vec![c(0.32979, 0.94405), c(0.32979, -0.94405)], arcs(&[(1, 2), (3, 4)], &[]), vec![]),
        "4.13" => p(
            vec![c(1.0, 0.0)],
            vec![c(0.0, 1.0), c(0.0, -1.0)],
            rays(&[1]),
            vec!["overscreened (m > n): the charges are one member of a continuous family"],
        ),
        "4.14" => p(pair3.clone(), vec![c(2.0 - r3, 0.0), c(2.0 + r3, 0.0)], arcs(&[(1, 2)], &[]), vec![]),
        "4.15" => p(
            pair3,
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)],
            None,
            vec![
                "caption pairs z1 with z4 and z2 with z3, but only two growth points are listed",
                "caption labels two charges xi_2",
            ],
        ),
        _ => return None,
    })
}

impl Preset {
    pub fn file_stem(&self) -> String {
        format!("figure-{}", self.id)
    }

    /// Scenario used for the run; `m` is set so that the solver is used when
    /// the charge count is in the underscreening regime.
    pub fn scenario(&self) -> Scenario {
        let mut sc = Scenario::new(Uniformization::Disk, self.listed.iter().map(|&z| Point::Finite(z)).collect());
        sc.name = Some(self.file_stem());
        sc.u = Some(Point::real(-1.0));
        sc.m = Some(self.printed_xi.len());
        sc.outputs.report = format!("{}.json", self.file_stem());
        sc.outputs.svg = format!("{}.svg", self.file_stem());
        sc.outputs.trace_csv = format!("{}.csv", self.file_stem());
        sc
    }

    /// Pattern in listed numbering, formatted like `LinkPattern`'s display.
    pub fn caption_display(&self) -> Option<String> {
        self.caption.as_ref().map(|(a, r)| display(a, r))
    }
}

pub fn display(arcs: &[(usize, usize)], rays: &[usize]) -> String {
    let mut arcs: Vec<(usize, usize)> = arcs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    arcs.sort();
    let mut rays = rays.to_vec();
    rays.sort();
    let a: Vec<String> = arcs.iter().map(|(a, b)| format!("({a},{b})")).collect();
    let r: Vec<String> = rays.iter().map(|r| r.to_string()).collect();
    format!("arcs {{{}}} rays {{{}}}", a.join(" "), r.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_resolves() {
        for id in IDS {
            let p = preset(id).unwrap();
            assert_eq!(p.id, id);
            assert!(p.listed.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        }
        assert!(preset("4.16").is_none());
    }

    #[test]
    fn tilted_charge_is_on_the_circle() {
        let p = preset("4.9").unwrap();
        assert!((p.printed_xi[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn display_matches_link_pattern_display() {
        let lp = sle0::link::LinkPattern::new(vec![(0, 3), (1, 2)], vec![], 4).unwrap();
        assert_eq!(display(&[(4, 1), (2, 3)], &[]), lp.to_string());
        assert_eq!(display(&[(2, 3)], &[4, 1]), "arcs {(2,3)} rays {1 4}");
    }
}
