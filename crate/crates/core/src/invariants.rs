//! Closed-form invariants of the quotient graph as functions of the
//! ramification profile, their graph-side counterparts, and Smith normal
//! forms for critical groups.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfpoly::count_irreducibles;
use crate::quotient::QuotientGraph;

/// q together with the degrees of the places in R.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RamProfile {
    pub q: u64,
    pub degrees: Vec<usize>,
}

impl RamProfile {
    /// Degrees are sorted. Rejects odd or empty R, zero degrees and a q that
    /// is not a prime power.
    pub fn new(q: u64, mut degrees: Vec<usize>) -> Result<RamProfile> {
        if prime_power(q).is_none() {
            return Err(Error::NotPrime(q.min(u32::MAX as u64) as u32));
        }
        if degrees.is_empty() || degrees.len() % 2 != 0 {
            return Err(Error::Precondition(format!(
                "R needs a positive even number of places, got {}",
                degrees.len()
            )));
        }
        if degrees.contains(&0) {
            return Err(Error::Precondition("place degrees are positive".into()));
        }
        degrees.sort_unstable();
        Ok(RamProfile { q, degrees })
    }

    /// Whether F_q[T] has enough monic irreducibles of each degree.
    pub fn is_realizable(&self) -> bool {
        let mut count: BTreeMap<usize, u64> = BTreeMap::new();
        for &d in &self.degrees {
            *count.entry(d).or_default() += 1;
        }
        count.iter().all(|(&d, &n)| count_irreducibles(self.q, d as u32) >= n)
    }

    fn q_i(&self) -> i128 {
        self.q as i128
    }

    fn two_pow(&self) -> i128 {
        1i128 << (self.degrees.len() - 1)
    }
}

/// Returns (p, e) with q = p^e.
fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut m, mut e) = (q, 0);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

/// 1 if every place of R has odd degree, else 0.
pub fn wp(r: &RamProfile) -> u8 {
    r.degrees.iter().all(|d| d % 2 == 1) as u8
}

fn exact_div(num: i128, den: i128, what: &'static str) -> Result<i64> {
    if den == 0 || num % den != 0 {
        return Err(Error::NonIntegral(what));
    }
    i64::try_from(num / den).map_err(|_| Error::NonIntegral(what))
}

/// g(R) = 1 + prod(q_x - 1)/(q^2 - 1) - q/(q + 1) 2^{#R-1} wp(R).
pub fn genus(r: &RamProfile) -> Result<i64> {
    let q = r.q_i();
    let mut prod: i128 = 1;
    for &d in &r.degrees {
        let qx = q.checked_pow(d as u32).ok_or(Error::NonIntegral("genus"))?;
        prod = prod.checked_mul(qx - 1).ok_or(Error::NonIntegral("genus"))?;
    }
    let num = (q * q - 1) + prod - q * (q - 1) * r.two_pow() * wp(r) as i128;
    exact_div(num, q * q - 1, "genus")
}

/// Number of terminal vertices, 2^{#R-1} wp(R).
pub fn v1(r: &RamProfile) -> i64 {
    (r.two_pow() * wp(r) as i128) as i64
}

/// Number of vertices of degree q + 1, (2g - 2 + V1)/(q - 1).
pub fn vq1(r: &RamProfile) -> Result<i64> {
    let num = 2 * genus(r)? as i128 - 2 + v1(r) as i128;
    exact_div(num, r.q_i() - 1, "V_{q+1}")
}

/// Number of edges, (V1 + (q + 1) V_{q+1})/2.
pub fn edges(r: &RamProfile) -> Result<i64> {
    let num = v1(r) as i128 + (r.q_i() + 1) * vq1(r)? as i128;
    exact_div(num, 2, "E")
}

/// E + 1 = g + V1 + V_{q+1}.
pub fn euler_check(r: &RamProfile) -> Result<bool> {
    Ok(edges(r)? + 1 == genus(r)? + v1(r) + vq1(r)?)
}

/// Number of optimal embeddings of the quadratic order of F_{q^2}, 2^{#R} wp(R).
pub fn eichler_count(r: &RamProfile) -> i64 {
    (2 * r.two_pow() * wp(r) as i128) as i64
}

/// First Betti number E - V + 1 of a connected quotient.
pub fn graph_h1(g: &QuotientGraph) -> Result<i64> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(g.num_edges() as i64 - g.num_vertices() as i64 + 1)
}

/// True iff some vertex has degree below q + 1.
pub fn smooth_point_criterion(g: &QuotientGraph) -> bool {
    (0..g.num_vertices()).any(|v| g.degree(v) < g.q as usize + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Presentation {
    /// Cyclic groups of order q^2 - 1, one per terminal vertex, amalgamated
    /// along their common subgroup of order q - 1.
    Amalgam { generators: Vec<String>, relations: Vec<String>, text: String },
    /// The graph has cycles; the unit group surjects onto a free group of this rank.
    NotATree { free_rank: i64 },
}

/// Presentation of the unit group read off a tree quotient. Generators
/// follow the discovery order of the terminal vertices.
pub fn presentation(g: &QuotientGraph) -> Result<Presentation> {
    let h1 = graph_h1(g)?;
    if h1 != 0 {
        return Ok(Presentation::NotATree { free_rank: h1 });
    }
    let q = g.q as usize;
    let terminal = g.terminal();
    for (v, vert) in g.vertices.iter().enumerate() {
        let want = if terminal.contains(&v) { q * q - 1 } else { q - 1 };
        if vert.stabilizer_order != want {
            return Err(Error::Invariant(format!(
                "vertex {} of degree {} has stabilizer of order {}, expected {want}",
                vert.lift, vert.degree, vert.stabilizer_order
            )));
        }
    }
    if let Some(e) = g.edges.iter().find(|e| e.stabilizer_order != q - 1) {
        return Err(Error::Invariant(format!("edge stabilizer of order {}", e.stabilizer_order)));
    }
    let gens: Vec<String> = (1..=terminal.len()).map(|k| format!("γ{k}")).collect();
    let orders: Vec<String> = gens.iter().map(|x| format!("{x}^{}", q * q - 1)).collect();
    let powers: Vec<String> = gens.iter().map(|x| format!("{x}^{}", q + 1)).collect();
    let mut relations: Vec<String> = orders.iter().map(|x| format!("{x} = 1")).collect();
    for w in powers.windows(2) {
        relations.push(format!("{} = {}", w[0], w[1]));
    }
    relations.sort();
    let mut text = format!("{} = 1", orders.join(" = "));
    if powers.len() > 1 {
        text.push_str(&format!(", {}", powers.join(" = ")));
    }
    Ok(Presentation::Amalgam { generators: gens, relations, text })
}

/// Invariant factors d_1 | d_2 | ... of an integer matrix, one per
/// diagonal position (zeros last for singular input).
pub fn smith_normal_form(m: &[Vec<i64>]) -> Vec<i64> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut diag = Vec::with_capacity(rows.min(cols));
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_abs_entry(&a, t) else {
            diag.resize(rows.min(cols), 0);
            break;
        };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                let f = a[i][t] / a[t][t];
                for j in t..cols {
                    a[i][j] -= f * a[t][j];
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let f = a[t][j] / a[t][t];
                for i in t..rows {
                    a[i][j] -= f * a[i][t];
                }
                clean &= a[t][j] == 0;
            }
            if clean {
                // the pivot must divide the rest of the block
                let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % a[t][t] != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            a[t][j] += a[i][j];
                        }
                        continue;
                    }
                }
            }
            let (pi, pj) = min_abs_entry(&a, t).expect("nonzero block");
            a.swap(t, pi);
            for r in a.iter_mut() {
                r.swap(t, pj);
            }
        }
        diag.push(a[t][t].abs() as i64);
    }
    diag
}

fn min_abs_entry(a: &[Vec<i128>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i128, usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, &x) in row.iter().enumerate().skip(t) {
            if x != 0 && best.is_none_or(|(b, _, _)| x.abs() < b) {
                best = Some((x.abs(), i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Laplacian with multi-edges counted with multiplicity.
pub fn laplacian(g: &QuotientGraph) -> Vec<Vec<i64>> {
    let n = g.num_vertices();
    let mut l = vec![vec![0i64; n]; n];
    for e in &g.edges {
        if e.a == e.b {
            continue;
        }
        let m = e.multiplicity as i64;
        l[e.a][e.a] += m;
        l[e.b][e.b] += m;
        l[e.a][e.b] -= m;
        l[e.b][e.a] -= m;
    }
    l
}

/// Nontrivial invariant factors of the cokernel of the reduced Laplacian.
pub fn critical_group(g: &QuotientGraph) -> Vec<i64> {
    let n = g.num_vertices();
    if n < 2 {
        return Vec::new();
    }
    let reduced: Vec<Vec<i64>> = laplacian(g)[..n - 1].iter().map(|r| r[..n - 1].to_vec()).collect();
    smith_normal_form(&reduced).into_iter().filter(|&d| d != 1).collect()
}

/// Measured counterparts of the closed-form values.
#[derive(Clone, Debug, Serialize)]
pub struct GraphReport {
    pub vertices: usize,
    pub edges: usize,
    #[serde(rename = "V1")]
    pub v1: usize,
    #[serde(rename = "Vq1")]
    pub vq1: usize,
    pub h1: i64,
    pub degrees: BTreeSet<usize>,
    pub stabilizer_orders: Vec<usize>,
    pub has_loops: bool,
    pub smooth_point: bool,
    pub critical_group: Vec<i64>,
    pub presentation: Presentation,
}

impl GraphReport {
    pub fn new(g: &QuotientGraph) -> Result<GraphReport> {
        let degrees: Vec<usize> = (0..g.num_vertices()).map(|v| g.degree(v)).collect();
        let q1 = g.q as usize + 1;
        Ok(GraphReport {
            vertices: g.num_vertices(),
            edges: g.num_edges(),
            v1: degrees.iter().filter(|&&d| d == 1).count(),
            vq1: degrees.iter().filter(|&&d| d == q1).count(),
            h1: graph_h1(g)?,
            degrees: degrees.into_iter().collect(),
            stabilizer_orders: g.vertices.iter().map(|v| v.stabilizer_order).collect(),
            has_loops: g.has_loops(),
            smooth_point: smooth_point_criterion(g),
            critical_group: critical_group(g),
            presentation: presentation(g)?,
        })
    }
}

/// Formula values for a profile, optionally compared against a quotient.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub q: u64,
    #[serde(rename = "R")]
    pub r: Vec<usize>,
    pub wp: u8,
    pub genus: i64,
    #[serde(rename = "V1")]
    pub v1: i64,
    #[serde(rename = "Vq1")]
    pub vq1: i64,
    #[serde(rename = "E")]
    pub e: i64,
    pub eichler: i64,
    pub graph: Option<GraphReport>,
    pub checks: BTreeMap<String, bool>,
}

impl Report {
    pub fn formulas(r: &RamProfile) -> Result<Report> {
        let (g, v, vq, e) = (genus(r)?, v1(r), vq1(r)?, edges(r)?);
        let eichler = eichler_count(r);
        let mut checks = BTreeMap::new();
        checks.insert("euler".into(), e + 1 == g + v + vq);
        checks.insert("eichler_twice_v1".into(), eichler == 2 * v);
        checks.insert("nonnegative".into(), g >= 0 && vq >= 0);
        Ok(Report {
            q: r.q,
            r: r.degrees.clone(),
            wp: wp(r),
            genus: g,
            v1: v,
            vq1: vq,
            e,
            eichler,
            graph: None,
            checks,
        })
    }

    pub fn with_graph(r: &RamProfile, g: &QuotientGraph) -> Result<Report> {
        let mut rep = Report::formulas(r)?;
        let gr = GraphReport::new(g)?;
        let q1 = r.q as usize + 1;
        let c = &mut rep.checks;
        c.insert("graph_V1".into(), gr.v1 as i64 == rep.v1);
        c.insert("graph_Vq1".into(), gr.vq1 as i64 == rep.vq1);
        c.insert("graph_E".into(), gr.edges as i64 == rep.e);
        c.insert("graph_h1_is_genus".into(), gr.h1 == rep.genus);
        c.insert("graph_degrees".into(), gr.degrees.iter().all(|&d| d == 1 || d == q1));
        c.insert("graph_no_loops".into(), !gr.has_loops);
        c.insert("smooth_point_iff_wp".into(), gr.smooth_point == (rep.wp == 1));
        rep.graph = Some(gr);
        Ok(rep)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.values().all(|&b| b)
    }
}

/// Realizable profiles over F_q with `sizes` places of degree at most `max_degree`.
pub fn profiles(q: u64, sizes: &[usize], max_degree: usize) -> Vec<RamProfile> {
    let mut out = Vec::new();
    for &n in sizes {
        let mut cur = Vec::with_capacity(n);
        multisets(n, 1, max_degree, &mut cur, &mut |d| {
            if let Ok(p) = RamProfile::new(q, d.to_vec()) {
                if p.is_realizable() {
                    out.push(p);
                }
            }
        });
    }
    out
}

fn multisets(n: usize, lo: usize, hi: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == n {
        f(cur);
        return;
    }
    for d in lo..=hi {
        cur.push(d);
        multisets(n, d, hi, cur, f);
        cur.pop();
    }
}

/// Formula reports for every realizable profile, in profile order.
pub fn sweep(qs: &[u64], sizes: &[usize], max_degree: usize) -> Vec<(RamProfile, Result<Report>)> {
    let all: Vec<RamProfile> = qs.iter().flat_map(|&q| profiles(q, sizes, max_degree)).collect();
    all.into_par_iter().map(|p| {
        let rep = Report::formulas(&p);
        (p, rep)
    }).collect()
}
