//! Phase-correlation analysis over a codebook and the grouping of correlated
//! elements onto shared control lines.
//!
//! Two elements are correlated at threshold ψ_th when their circular phase
//! difference stays within ψ_th in every codeword. Correlated elements can
//! share one control signal; the representative's phase drives the group.
//!
//! Elements are ordered lexicographically by `(row, col)` throughout this
//! module. That order decides pair orientation, greedy grouping and group ids.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::PlanarArray;
use crate::error::{domain, Result, RisError};
use crate::scalar::Scalar;
use crate::steering::{CodewordShaper, PhaseShiftMatrix, SteeringPlan};

/// Largest surface the all-pairs mode accepts by default.
pub const DEFAULT_ALL_PAIRS_CAP: usize = 10_000;

/// `(row, col)` of one element.
pub type Element = (usize, usize);

/// Circular distance between two angles in degrees, in `[0, 180]`.
pub fn circular_distance_deg<T: Scalar>(a_deg: T, b_deg: T) -> T {
    let full = T::lit(360.0);
    let d = ((a_deg - b_deg) % full).abs();
    d.min(full - d)
}

fn circular_distance_rad<T: Scalar>(a: T, b: T) -> T {
    let tau = T::TAU();
    let d = ((a - b) % tau).abs();
    d.min(tau - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairMode {
    /// Every pair of elements on the surface.
    AllPairs,
    /// Pairs of columns, compared element-wise row by row.
    ColumnPairs,
    /// Every pair of elements that share a column.
    WithinColumns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupingMode {
    /// Greedy cliques: every pair inside a group is correlated.
    Exact,
    /// Connected components of the correlation graph.
    Transitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRecord<T> {
    pub idx_a: Element,
    pub idx_b: Element,
    /// Largest circular difference over all codewords, in degrees.
    pub max_diff_deg: T,
    pub correlated: bool,
}

/// Pair records of one plan. In column mode the records carry row 0 and name columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTable<T> {
    pub mode: PairMode,
    pub array: PlanarArray,
    pub threshold_deg: Option<T>,
    pub records: Vec<PairRecord<T>>,
}

/// Per-element phase history across the codebook, element-major.
fn phase_history<T: Scalar>(plan: &SteeringPlan<T>) -> Result<(PlanarArray, Vec<Vec<T>>)> {
    let array = plan
        .array()
        .ok_or_else(|| domain("correlation analysis needs at least one codeword"))?;
    for c in &plan.codewords {
        if c.array != array {
            return Err(RisError::LengthMismatch {
                expected: array.len(),
                actual: c.array.len(),
            });
        }
    }
    let history = (0..array.len())
        .map(|k| plan.codewords.iter().map(|c| c.phases[k]).collect())
        .collect();
    Ok((array, history))
}

fn max_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| circular_distance_rad(x, y))
        .fold(T::zero(), T::max)
        .to_degrees()
}

fn record<T>(idx_a: Element, idx_b: Element, max_diff_deg: T) -> PairRecord<T> {
    PairRecord {
        idx_a,
        idx_b,
        max_diff_deg,
        correlated: false,
    }
}

/// Worst-case pairwise phase difference over every codeword of `plan`.
pub fn pairwise_max_differences<T: Scalar>(
    plan: &SteeringPlan<T>,
    mode: PairMode,
) -> Result<PairTable<T>> {
    pairwise_max_differences_capped(plan, mode, DEFAULT_ALL_PAIRS_CAP)
}

/// As [`pairwise_max_differences`] with an explicit element cap for the all-pairs mode.
pub fn pairwise_max_differences_capped<T: Scalar>(
    plan: &SteeringPlan<T>,
    mode: PairMode,
    all_pairs_cap: usize,
) -> Result<PairTable<T>> {
    let (array, history) = phase_history(plan)?;
    let h = |row: usize, col: usize| &history[array.index(row, col)];
    let records = match mode {
        PairMode::AllPairs => {
            if array.len() > all_pairs_cap {
                return Err(RisError::CapExceeded {
                    what: "all-pairs correlation elements",
                    requested: array.len(),
                    cap: all_pairs_cap,
                });
            }
            let elements: Vec<Element> = (0..array.rows)
                .flat_map(|r| (0..array.cols).map(move |c| (r, c)))
                .collect();
            elements
                .par_iter()
                .enumerate()
                .flat_map_iter(|(i, &a)| {
                    elements[i + 1..]
                        .iter()
                        .map(move |&b| record(a, b, max_distance(h(a.0, a.1), h(b.0, b.1))))
                })
                .collect()
        }
        PairMode::ColumnPairs => (0..array.cols)
            .into_par_iter()
            .flat_map_iter(|i| {
                (i + 1..array.cols).map(move |j| {
                    let d = (0..array.rows)
                        .map(|r| max_distance(h(r, i), h(r, j)))
                        .fold(T::zero(), T::max);
                    record((0, i), (0, j), d)
                })
            })
            .collect(),
        PairMode::WithinColumns => {
            let pairs: Vec<Element> = (0..array.rows)
                .flat_map(|r1| (r1 + 1..array.rows).map(move |r2| (r1, r2)))
                .collect();
            // sorted by (row_a, col_a, row_b): row-major over the first element
            let mut out: Vec<PairRecord<T>> = (0..array.cols)
                .into_par_iter()
                .flat_map_iter(|c| {
                    pairs.iter().map(move |&(r1, r2)| {
                        record((r1, c), (r2, c), max_distance(h(r1, c), h(r2, c)))
                    })
                })
                .collect();
            out.sort_by_key(|p| (p.idx_a, p.idx_b));
            out
        }
    };
    Ok(PairTable {
        mode,
        array,
        threshold_deg: None,
        records,
    })
}

/// Flags each pair whose worst-case difference stays within `psi_th_deg`.
pub fn correlate<T: Scalar>(mut table: PairTable<T>, psi_th_deg: T) -> Result<PairTable<T>> {
    if !(psi_th_deg >= T::zero() && psi_th_deg <= T::lit(180.0)) {
        return Err(domain(format!(
            "psi_th_deg must lie in [0, 180], got {psi_th_deg}"
        )));
    }
    for p in &mut table.records {
        p.correlated = p.max_diff_deg <= psi_th_deg;
    }
    table.threshold_deg = Some(psi_th_deg);
    Ok(table)
}

/// Partition of the surface into control groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectedGroups {
    pub array: PlanarArray,
    /// Group id of each element, indexed like codeword phases (`col·rows + row`).
    pub group_of: Vec<usize>,
    /// Lowest `(row, col)` of each group.
    pub representatives: Vec<Element>,
    pub n_groups: usize,
}

impl ConnectedGroups {
    /// Every element on its own line.
    pub fn singletons(array: PlanarArray) -> Self {
        Self::from_keys(array, |r, c| array.index(r, c))
    }

    /// One group per column.
    pub fn columns(array: PlanarArray) -> Self {
        Self::from_keys(array, |_, c| c)
    }

    /// Groups elements sharing a key; ids follow the first element of each group.
    fn from_keys(array: PlanarArray, key: impl Fn(usize, usize) -> usize) -> Self {
        let mut id_of_key = std::collections::HashMap::new();
        let mut group_of = vec![0; array.len()];
        let mut representatives = Vec::new();
        for r in 0..array.rows {
            for c in 0..array.cols {
                let next = representatives.len();
                let id = *id_of_key.entry(key(r, c)).or_insert(next);
                if id == next {
                    representatives.push((r, c));
                }
                group_of[array.index(r, c)] = id;
            }
        }
        Self {
            array,
            group_of,
            n_groups: representatives.len(),
            representatives,
        }
    }

    pub fn group(&self, row: usize, col: usize) -> usize {
        self.group_of[self.array.index(row, col)]
    }

    pub fn members(&self, group: usize) -> Vec<Element> {
        let mut out = Vec::new();
        for r in 0..self.array.rows {
            for c in 0..self.array.cols {
                if self.group(r, c) == group {
                    out.push((r, c));
                }
            }
        }
        out
    }

    /// Copy of `psi` in which every element takes its representative's phase.
    pub fn apply<T: Scalar>(&self, psi: &PhaseShiftMatrix<T>) -> Result<PhaseShiftMatrix<T>> {
        if psi.array != self.array {
            return Err(RisError::LengthMismatch {
                expected: self.array.len(),
                actual: psi.array.len(),
            });
        }
        let phases = (0..self.array.len())
            .map(|k| {
                let (r, c) = self.representatives[self.group_of[k]];
                psi.phase(r, c)
            })
            .collect();
        Ok(PhaseShiftMatrix {
            array: self.array,
            phases,
            steering_angle_deg: psi.steering_angle_deg,
        })
    }
}

impl<T: Scalar> CodewordShaper<T> for ConnectedGroups {
    fn shape(&self, psi: PhaseShiftMatrix<T>) -> PhaseShiftMatrix<T> {
        self.apply(&psi)
            .expect("codeword matches the grouped surface")
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Cluster labels of `n` ordered nodes given the correlated edges.
fn cluster(n: usize, edges: &[(usize, usize)], mode: GroupingMode) -> Vec<usize> {
    match mode {
        GroupingMode::Transitive => {
            let mut uf = UnionFind::new(n);
            for &(a, b) in edges {
                uf.union(a, b);
            }
            (0..n).map(|i| uf.find(i)).collect()
        }
        GroupingMode::Exact => {
            let linked: HashSet<(usize, usize)> =
                edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            let mut neighbours = vec![Vec::new(); n];
            for &(a, b) in &linked {
                neighbours[a].push(b);
                neighbours[b].push(a);
            }
            for list in &mut neighbours {
                list.sort_unstable();
            }
            let mut label = vec![usize::MAX; n];
            for seed in 0..n {
                if label[seed] != usize::MAX {
                    continue;
                }
                label[seed] = seed;
                let mut members = vec![seed];
                for &cand in &neighbours[seed] {
                    if cand < seed || label[cand] != usize::MAX {
                        continue;
                    }
                    if members
                        .iter()
                        .all(|&m| linked.contains(&(m.min(cand), m.max(cand))))
                    {
                        label[cand] = seed;
                        members.push(cand);
                    }
                }
            }
            label
        }
    }
}

/// Groups correlated elements. Needs a table produced by [`correlate`].
pub fn build_groups<T: Scalar>(
    table: &PairTable<T>,
    mode: GroupingMode,
) -> Result<ConnectedGroups> {
    if table.threshold_deg.is_none() {
        return Err(domain(
            "pair table has no correlation decisions; run correlate first",
        ));
    }
    let array = table.array;
    match table.mode {
        PairMode::ColumnPairs => {
            let edges: Vec<_> = table
                .records
                .iter()
                .filter(|p| p.correlated)
                .map(|p| (p.idx_a.1, p.idx_b.1))
                .collect();
            let col_label = cluster(array.cols, &edges, mode);
            Ok(ConnectedGroups::from_keys(array, |r, c| {
                r * array.cols + col_label[c]
            }))
        }
        PairMode::AllPairs | PairMode::WithinColumns => {
            let order = |(r, c): Element| r * array.cols + c;
            let edges: Vec<_> = table
                .records
                .iter()
                .filter(|p| p.correlated)
                .map(|p| (order(p.idx_a), order(p.idx_b)))
                .collect();
            let label = cluster(array.len(), &edges, mode);
            Ok(ConnectedGroups::from_keys(array, |r, c| {
                label[order((r, c))]
            }))
        }
    }
}

/// Pair analysis, thresholding and grouping in one call.
pub fn group_plan<T: Scalar>(
    plan: &SteeringPlan<T>,
    pair_mode: PairMode,
    psi_th_deg: T,
    grouping: GroupingMode,
) -> Result<ConnectedGroups> {
    let table = correlate(pairwise_max_differences(plan, pair_mode)?, psi_th_deg)?;
    build_groups(&table, grouping)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSweep<T> {
    pub thresholds_deg: Vec<T>,
    pub correlated_columns: Vec<usize>,
}

/// Largest intra-column phase spread of each column over the codebook, in degrees.
pub fn column_spreads_deg<T: Scalar>(plan: &SteeringPlan<T>) -> Result<Vec<T>> {
    let (array, history) = phase_history(plan)?;
    Ok((0..array.cols)
        .into_par_iter()
        .map(|c| {
            let mut worst = T::zero();
            for r1 in 0..array.rows {
                for r2 in r1 + 1..array.rows {
                    let d =
                        max_distance(&history[array.index(r1, c)], &history[array.index(r2, c)]);
                    worst = worst.max(d);
                }
            }
            worst
        })
        .collect())
}

/// Number of columns whose elements all stay within each threshold of one another.
pub fn threshold_sweep<T: Scalar>(
    plan: &SteeringPlan<T>,
    thresholds_deg: &[T],
) -> Result<ThresholdSweep<T>> {
    if thresholds_deg.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(domain("thresholds must be sorted ascending"));
    }
    let spreads = column_spreads_deg(plan)?;
    let correlated_columns = thresholds_deg
        .iter()
        .map(|&t| spreads.iter().filter(|&&s| s <= t).count())
        .collect();
    Ok(ThresholdSweep {
        thresholds_deg: thresholds_deg.to_vec(),
        correlated_columns,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlLine {
    pub group_id: usize,
    pub representative: Element,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlMap {
    pub lines: Vec<ControlLine>,
    pub load_impedances: usize,
    pub dc_lines: usize,
}

/// One load impedance and one DC bias line per group.
pub fn connected_control_map(groups: &ConnectedGroups) -> ControlMap {
    let mut sizes = vec![0usize; groups.n_groups];
    for &g in &groups.group_of {
        sizes[g] += 1;
    }
    let lines = groups
        .representatives
        .iter()
        .enumerate()
        .map(|(group_id, &representative)| ControlLine {
            group_id,
            representative,
            members: sizes[group_id],
        })
        .collect();
    ControlMap {
        lines,
        load_impedances: groups.n_groups,
        dc_lines: groups.n_groups,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan_from(array: PlanarArray, codewords: Vec<Vec<f64>>) -> SteeringPlan<f64> {
        SteeringPlan {
            crossing_angles_deg: (0..codewords.len()).map(|q| q as f64).collect(),
            codewords: codewords
                .into_iter()
                .map(|p| PhaseShiftMatrix::new(array, p, 0.0).unwrap())
                .collect(),
        }
    }

    #[test]
    fn circular_wrap() {
        assert!((circular_distance_deg(10.0_f64, 350.0) - 20.0).abs() < 1e-12);
        assert!((circular_distance_deg(350.0_f64, 10.0) - 20.0).abs() < 1e-12);
        assert!((circular_distance_deg(0.0_f64, 180.0) - 180.0).abs() < 1e-12);
        assert_eq!(circular_distance_deg(725.0, 5.0), 0.0);
    }

    #[test]
    fn duplicated_codewords_have_zero_spread() {
        let arr = PlanarArray::new(2, 2).unwrap();
        let p = vec![0.1, 1.0, 2.0, 3.0];
        let plan = plan_from(arr, vec![p.clone(), p.clone(), p]);
        let t = pairwise_max_differences(&plan, PairMode::AllPairs).unwrap();
        assert_eq!(t.records.len(), 6);
        let t = correlate(t, 0.0).unwrap();
        assert!(t.records.iter().any(|r| !r.correlated));
        let plan = plan_from(arr, vec![vec![0.5; 4]; 3]);
        let t = pairwise_max_differences(&plan, PairMode::AllPairs).unwrap();
        assert!(t.records.iter().all(|r| r.max_diff_deg == 0.0));
    }

    #[test]
    fn pairs_are_lexicographically_oriented() {
        let arr = PlanarArray::new(3, 2).unwrap();
        let plan = plan_from(arr, vec![vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]]);
        for mode in [PairMode::AllPairs, PairMode::WithinColumns] {
            let t = pairwise_max_differences(&plan, mode).unwrap();
            assert!(t.records.iter().all(|p| p.idx_a < p.idx_b));
            assert!(t
                .records
                .windows(2)
                .all(|w| (w[0].idx_a, w[0].idx_b) < (w[1].idx_a, w[1].idx_b)));
        }
        let t = pairwise_max_differences(&plan, PairMode::WithinColumns).unwrap();
        assert_eq!(t.records.len(), 6);
    }

    #[test]
    fn all_pairs_cap() {
        let arr = PlanarArray::new(3, 3).unwrap();
        let plan = plan_from(arr, vec![vec![0.0; 9]]);
        assert!(matches!(
            pairwise_max_differences_capped(&plan, PairMode::AllPairs, 8),
            Err(RisError::CapExceeded {
                requested: 9,
                cap: 8,
                ..
            })
        ));
    }

    #[test]
    fn exact_versus_transitive_chain() {
        // elements 1..4 in a 1x4 row, only (1,2) and (2,3) correlated
        let arr = PlanarArray::new(1, 4).unwrap();
        let table = PairTable {
            mode: PairMode::AllPairs,
            array: arr,
            threshold_deg: Some(10.0),
            records: vec![
                PairRecord {
                    idx_a: (0, 0),
                    idx_b: (0, 1),
                    max_diff_deg: 5.0,
                    correlated: true,
                },
                PairRecord {
                    idx_a: (0, 0),
                    idx_b: (0, 2),
                    max_diff_deg: 50.0,
                    correlated: false,
                },
                PairRecord {
                    idx_a: (0, 0),
                    idx_b: (0, 3),
                    max_diff_deg: 50.0,
                    correlated: false,
                },
                PairRecord {
                    idx_a: (0, 1),
                    idx_b: (0, 2),
                    max_diff_deg: 5.0,
                    correlated: true,
                },
                PairRecord {
                    idx_a: (0, 1),
                    idx_b: (0, 3),
                    max_diff_deg: 50.0,
                    correlated: false,
                },
                PairRecord {
                    idx_a: (0, 2),
                    idx_b: (0, 3),
                    max_diff_deg: 50.0,
                    correlated: false,
                },
            ],
        };
        let exact = build_groups(&table, GroupingMode::Exact).unwrap();
        assert_eq!(exact.group_of, vec![0, 0, 1, 2]);
        let trans = build_groups(&table, GroupingMode::Transitive).unwrap();
        assert_eq!(trans.group_of, vec![0, 0, 0, 1]);
    }

    #[test]
    fn extreme_thresholds() {
        let arr = PlanarArray::new(3, 3).unwrap();
        let plan = plan_from(
            arr,
            vec![
                (0..9).map(|k| k as f64 * 0.7).collect(),
                (0..9).map(|k| k as f64 * 1.3).collect(),
            ],
        );
        let t = pairwise_max_differences(&plan, PairMode::AllPairs).unwrap();
        let all = build_groups(&correlate(t.clone(), 180.0).unwrap(), GroupingMode::Exact).unwrap();
        assert_eq!(all.n_groups, 1);
        assert_eq!(all.representatives, vec![(0, 0)]);
        let none = build_groups(&correlate(t, 0.0).unwrap(), GroupingMode::Exact).unwrap();
        assert_eq!(none.n_groups, 9);
        assert!(correlate(
            pairwise_max_differences(&plan, PairMode::AllPairs).unwrap(),
            181.0
        )
        .is_err());
    }

    #[test]
    fn column_groups_share_first_row_phase() {
        let arr = PlanarArray::new(2, 3).unwrap();
        let groups = ConnectedGroups::columns(arr);
        assert_eq!(groups.n_groups, 3);
        let psi = PhaseShiftMatrix::new(arr, vec![0.1, 0.2, 1.1, 1.2, 2.1, 2.2], 0.0).unwrap();
        let shared = groups.apply(&psi).unwrap();
        assert_eq!(shared.phases, vec![0.1, 0.1, 1.1, 1.1, 2.1, 2.1]);
        let map = connected_control_map(&groups);
        assert_eq!(map.dc_lines, 3);
        assert_eq!(map.lines[1].representative, (0, 1));
        assert_eq!(map.lines[1].members, 2);
        assert_eq!(
            connected_control_map(&ConnectedGroups::singletons(arr)).dc_lines,
            6
        );
    }

    #[test]
    fn column_pair_mode_groups_rows_across_columns() {
        let arr = PlanarArray::new(2, 3).unwrap();
        // columns 0 and 1 identical, column 2 far away
        let plan = plan_from(arr, vec![vec![0.0, 1.0, 0.0, 1.0, 3.0, 4.0]]);
        let t = correlate(
            pairwise_max_differences(&plan, PairMode::ColumnPairs).unwrap(),
            5.0,
        )
        .unwrap();
        assert_eq!(t.records.len(), 3);
        let g = build_groups(&t, GroupingMode::Exact).unwrap();
        assert_eq!(g.n_groups, 4);
        assert_eq!(g.group(0, 0), g.group(0, 1));
        assert_ne!(g.group(0, 0), g.group(1, 0));
    }

    #[test]
    fn sweep_requires_sorted_thresholds() {
        let arr = PlanarArray::new(2, 2).unwrap();
        let plan = plan_from(arr, vec![vec![0.0, 0.5, 0.0, 2.0]]);
        assert!(threshold_sweep(&plan, &[10.0, 5.0]).is_err());
        let s = threshold_sweep(&plan, &[0.0, 30.0, 180.0]).unwrap();
        assert_eq!(s.correlated_columns, vec![0, 1, 2]);
    }

    #[test]
    fn build_needs_decisions() {
        let arr = PlanarArray::new(2, 2).unwrap();
        let plan = plan_from(arr, vec![vec![0.0; 4]]);
        let t = pairwise_max_differences(&plan, PairMode::AllPairs).unwrap();
        assert!(build_groups(&t, GroupingMode::Exact).is_err());
    }
}
