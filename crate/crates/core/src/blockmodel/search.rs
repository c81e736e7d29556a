//! Restart-based best-improvement local search over partitions.
//!
//! Each restart draws a uniformly random partition into exactly `k`
//! non-empty clusters and then repeatedly applies the single best move
//! (relocating one node, or exchanging two nodes of different clusters) until
//! no move lowers the criterion. Moves are scanned in a fixed order, node
//! index ascending then target cluster ascending, with relocations before
//! exchanges; the first of several equally good moves wins.
//!
//! Restart `r` is seeded with `seed + r`, so restarts can run in parallel and
//! still reduce to the same answer as a sequential run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::criterion::{criterion_value, evaluate};
use super::{canonical_labels, improves, BlockSpec, BlockType, BlockmodelResult, Diagonal, Measure, Partition};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Uniform draw from all assignments of `n` nodes onto `k` labels that use
/// every label.
pub fn random_partition<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    assert!(k >= 1 && n >= k, "need n >= k >= 1");
    // cover[r][u]: probability that r uniform draws hit u given labels
    let kf = k as f64;
    let mut cover = vec![vec![0.0f64; k + 1]; n + 1];
    cover[0][0] = 1.0;
    for r in 1..=n {
        for u in 0..=k {
            let keep = (kf - u as f64) / kf * cover[r - 1][u];
            let hit = if u > 0 { u as f64 / kf * cover[r - 1][u - 1] } else { 0.0 };
            cover[r][u] = keep + hit;
        }
    }

    let mut used: Vec<usize> = Vec::with_capacity(k);
    let mut unused: Vec<usize> = (0..k).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let rest = n - i - 1;
        let u = unused.len();
        let w_used = used.len() as f64 * cover[rest][u];
        let w_unused = if u > 0 { u as f64 * cover[rest][u - 1] } else { 0.0 };
        let pick_used = w_unused == 0.0 || (w_used > 0.0 && rng.gen::<f64>() * (w_used + w_unused) < w_used);
        let label = if pick_used {
            used[rng.gen_range(0..used.len())]
        } else {
            let label = unused.swap_remove(rng.gen_range(0..u));
            used.push(label);
            label
        };
        out.push(label);
    }
    out
}

/// Scores candidate moves from a fixed current assignment.
trait MoveEvaluator {
    fn reset(&mut self, assignment: &[usize]);
    fn total(&self) -> f64;
    /// Criterion after moving `node` into cluster `to`.
    fn relocation(&mut self, node: usize, to: usize) -> f64;
    /// Criterion after swapping the clusters of `u` and `v`.
    fn exchange(&mut self, u: usize, v: usize) -> f64;
}

/// Re-evaluates the whole criterion for every candidate. Works for any measure.
struct FullEvaluator<'a> {
    matrix: &'a SquareMatrix,
    spec: &'a BlockSpec,
    assignment: Vec<usize>,
    total: f64,
}

impl MoveEvaluator for FullEvaluator<'_> {
    fn reset(&mut self, assignment: &[usize]) {
        self.assignment.clear();
        self.assignment.extend_from_slice(assignment);
        self.total = criterion_value(self.matrix, &self.assignment, self.spec);
    }

    fn total(&self) -> f64 {
        self.total
    }

    fn relocation(&mut self, node: usize, to: usize) -> f64 {
        let from = self.assignment[node];
        self.assignment[node] = to;
        let value = criterion_value(self.matrix, &self.assignment, self.spec);
        self.assignment[node] = from;
        value
    }

    fn exchange(&mut self, u: usize, v: usize) -> f64 {
        self.assignment.swap(u, v);
        let value = criterion_value(self.matrix, &self.assignment, self.spec);
        self.assignment.swap(u, v);
        value
    }
}

/// Cell count, sum and sum of squares of a block or block fragment.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn add(&mut self, x: f64) {
        self.count += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn remove(&mut self, x: f64) {
        self.count -= 1.0;
        self.sum -= x;
        self.sum_sq -= x * x;
    }

    fn absorb(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn release(&mut self, other: &Moments) {
        self.count -= other.count;
        self.sum -= other.sum;
        self.sum_sq -= other.sum_sq;
    }
}

/// Sum-of-squares evaluator working from block moments.
///
/// With `m` cells of sum `s` and square sum `q`, a null block scores `q` and a
/// complete block `q - s^2 / m`. A move changes only the blocks in the rows
/// and columns of the two clusters involved, and those changes follow from
/// each node's per-cluster row and column moments.
struct MomentEvaluator<'a> {
    matrix: &'a SquareMatrix,
    k: usize,
    include_diagonal: bool,
    allow_null: bool,
    allow_complete: bool,
    assignment: Vec<usize>,
    blocks: Vec<Moments>,
    /// `rows[u * k + c]`: cells `(u, y)` with `y != u` in cluster `c`
    rows: Vec<Moments>,
    /// `cols[u * k + c]`: cells `(x, u)` with `x != u` in cluster `c`
    cols: Vec<Moments>,
    total: f64,
    scratch: Vec<Moments>,
    row_tmp: Vec<Moments>,
    col_tmp: Vec<Moments>,
}

impl<'a> MomentEvaluator<'a> {
    fn new(matrix: &'a SquareMatrix, spec: &BlockSpec) -> Self {
        let (n, k) = (matrix.dim(), spec.k);
        MomentEvaluator {
            matrix,
            k,
            include_diagonal: spec.diagonal == Diagonal::Include,
            allow_null: spec.allows(BlockType::Null),
            allow_complete: spec.allows(BlockType::Complete),
            assignment: Vec::with_capacity(n),
            blocks: vec![Moments::default(); k * k],
            rows: vec![Moments::default(); n * k],
            cols: vec![Moments::default(); n * k],
            total: 0.0,
            scratch: vec![Moments::default(); k * k],
            row_tmp: vec![Moments::default(); k],
            col_tmp: vec![Moments::default(); k],
        }
    }

    fn block_score(&self, m: &Moments) -> f64 {
        let null = m.sum_sq;
        let complete = if m.count < 0.5 {
            0.0
        } else {
            (m.sum_sq - m.sum * m.sum / m.count).max(0.0)
        };
        match (self.allow_null, self.allow_complete) {
            (true, true) => {
                if complete < null {
                    complete
                } else {
                    null
                }
            }
            (true, false) => null,
            _ => complete,
        }
    }

    fn sum_scores(&self, blocks: &[Moments]) -> f64 {
        blocks.iter().map(|b| self.block_score(b)).sum()
    }

    /// Moves a node with the given row/column fragments from `from` to `to`.
    fn shift(
        blocks: &mut [Moments],
        k: usize,
        row: &[Moments],
        col: &[Moments],
        diagonal: Option<f64>,
        from: usize,
        to: usize,
    ) {
        for c in 0..k {
            blocks[from * k + c].release(&row[c]);
            blocks[to * k + c].absorb(&row[c]);
            blocks[c * k + from].release(&col[c]);
            blocks[c * k + to].absorb(&col[c]);
        }
        if let Some(d) = diagonal {
            blocks[from * k + from].remove(d);
            blocks[to * k + to].add(d);
        }
    }

    fn diagonal_of(&self, u: usize) -> Option<f64> {
        self.include_diagonal.then(|| self.matrix.get(u, u))
    }
}

impl MoveEvaluator for MomentEvaluator<'_> {
    fn reset(&mut self, assignment: &[usize]) {
        let (n, k) = (self.matrix.dim(), self.k);
        self.assignment.clear();
        self.assignment.extend_from_slice(assignment);
        self.rows.iter_mut().for_each(|m| *m = Moments::default());
        self.cols.iter_mut().for_each(|m| *m = Moments::default());
        self.blocks.iter_mut().for_each(|m| *m = Moments::default());
        for u in 0..n {
            let cu = assignment[u];
            let row = self.matrix.row(u);
            for (y, &x) in row.iter().enumerate() {
                if y == u {
                    if self.include_diagonal {
                        self.blocks[cu * k + cu].add(x);
                    }
                    continue;
                }
                let cy = assignment[y];
                self.rows[u * k + cy].add(x);
                self.cols[y * k + cu].add(x);
                self.blocks[cu * k + cy].add(x);
            }
        }
        self.total = self.sum_scores(&self.blocks);
    }

    fn total(&self) -> f64 {
        self.total
    }

    fn relocation(&mut self, node: usize, to: usize) -> f64 {
        let k = self.k;
        let from = self.assignment[node];
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.copy_from_slice(&self.blocks);
        Self::shift(
            &mut scratch,
            k,
            &self.rows[node * k..(node + 1) * k],
            &self.cols[node * k..(node + 1) * k],
            self.diagonal_of(node),
            from,
            to,
        );
        let value = self.sum_scores(&scratch);
        self.scratch = scratch;
        value
    }

    fn exchange(&mut self, u: usize, v: usize) -> f64 {
        let k = self.k;
        let (a, b) = (self.assignment[u], self.assignment[v]);
        let mut scratch = std::mem::take(&mut self.scratch);
        let mut row_v = std::mem::take(&mut self.row_tmp);
        let mut col_v = std::mem::take(&mut self.col_tmp);
        scratch.copy_from_slice(&self.blocks);
        Self::shift(
            &mut scratch,
            k,
            &self.rows[u * k..(u + 1) * k],
            &self.cols[u * k..(u + 1) * k],
            self.diagonal_of(u),
            a,
            b,
        );
        // v's fragments see u in cluster b now
        row_v.copy_from_slice(&self.rows[v * k..(v + 1) * k]);
        col_v.copy_from_slice(&self.cols[v * k..(v + 1) * k]);
        let (vu, uv) = (self.matrix.get(v, u), self.matrix.get(u, v));
        row_v[a].remove(vu);
        row_v[b].add(vu);
        col_v[a].remove(uv);
        col_v[b].add(uv);
        Self::shift(&mut scratch, k, &row_v, &col_v, self.diagonal_of(v), b, a);
        let value = self.sum_scores(&scratch);
        self.scratch = scratch;
        self.row_tmp = row_v;
        self.col_tmp = col_v;
        value
    }
}

#[derive(Debug, Clone, Copy)]
enum Move {
    Relocate { node: usize, to: usize },
    Exchange { u: usize, v: usize },
}

/// Descends from `assignment` to a local optimum; returns the number of moves.
fn descend<E: MoveEvaluator>(eval: &mut E, assignment: &mut [usize], k: usize) -> usize {
    let n = assignment.len();
    let mut sizes = vec![0usize; k];
    for &c in assignment.iter() {
        sizes[c] += 1;
    }
    eval.reset(assignment);
    let mut moves = 0;
    loop {
        let current = eval.total();
        let mut best: Option<(f64, Move)> = None;
        let consider = |value: f64, mv: Move, best: &mut Option<(f64, Move)>| {
            let bar = best.map_or(current, |(v, _)| v);
            if improves(value, current) && value < bar {
                *best = Some((value, mv));
            }
        };
        for (node, &from) in assignment.iter().enumerate() {
            if sizes[from] == 1 {
                continue;
            }
            for to in 0..k {
                if to != from {
                    let value = eval.relocation(node, to);
                    consider(value, Move::Relocate { node, to }, &mut best);
                }
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                if assignment[u] != assignment[v] {
                    let value = eval.exchange(u, v);
                    consider(value, Move::Exchange { u, v }, &mut best);
                }
            }
        }
        let Some((_, mv)) = best else {
            return moves;
        };
        match mv {
            Move::Relocate { node, to } => {
                sizes[assignment[node]] -= 1;
                sizes[to] += 1;
                assignment[node] = to;
            }
            Move::Exchange { u, v } => assignment.swap(u, v),
        }
        eval.reset(assignment);
        moves += 1;
    }
}

/// How candidate moves are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchEngine {
    /// Incremental block moments for sum of squares, full re-evaluation otherwise.
    #[default]
    Auto,
    /// Full re-evaluation of the criterion for every candidate move.
    Full,
}

/// Outcome of one restart.
#[derive(Debug, Clone, PartialEq)]
struct RestartOutcome {
    assignment: Vec<usize>,
    criterion: f64,
}

#[derive(Debug, Clone)]
pub struct LocalSearch<'a> {
    pub matrix: &'a SquareMatrix,
    pub spec: &'a BlockSpec,
    pub restarts: usize,
    pub seed: u64,
    pub engine: SearchEngine,
}

impl<'a> LocalSearch<'a> {
    pub fn new(matrix: &'a SquareMatrix, spec: &'a BlockSpec, restarts: usize, seed: u64) -> Self {
        LocalSearch {
            matrix,
            spec,
            restarts,
            seed,
            engine: SearchEngine::Auto,
        }
    }

    pub fn engine(mut self, engine: SearchEngine) -> Self {
        self.engine = engine;
        self
    }

    fn restart(&self, index: usize) -> RestartOutcome {
        let n = self.matrix.dim();
        let k = self.spec.k;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(index as u64));
        let mut assignment = random_partition(n, k, &mut rng);
        let use_moments = self.engine == SearchEngine::Auto && self.spec.measure == Measure::SumOfSquares;
        if use_moments {
            descend(&mut MomentEvaluator::new(self.matrix, self.spec), &mut assignment, k);
        } else {
            let mut eval = FullEvaluator {
                matrix: self.matrix,
                spec: self.spec,
                assignment: Vec::new(),
                total: 0.0,
            };
            descend(&mut eval, &mut assignment, k);
        }
        let assignment = canonical_labels(&assignment, k);
        let criterion = criterion_value(self.matrix, &assignment, self.spec);
        RestartOutcome { assignment, criterion }
    }

    pub fn run(&self) -> Result<BlockmodelResult> {
        let n = self.matrix.dim();
        let k = self.spec.k;
        if n < k {
            return Err(Error::TooFewNodes { n, k });
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        let outcomes: Vec<RestartOutcome> =
            (0..self.restarts).into_par_iter().map(|r| self.restart(r)).collect();

        let mut best = 0;
        for (i, o) in outcomes.iter().enumerate().skip(1) {
            if improves(o.criterion, outcomes[best].criterion) {
                best = i;
            }
        }
        let partition = Partition::new(outcomes[best].assignment.clone(), k)?;
        let fit = evaluate(self.matrix, partition.assignment(), self.spec);
        let mut result = BlockmodelResult::from_fit(partition, fit);
        result.restarts_run = self.restarts;
        result.best_restart_index = best;
        result.restart_criteria = outcomes.iter().map(|o| o.criterion).collect();
        Ok(result)
    }
}

/// Best local optimum over `restarts` seeded restarts.
pub fn local_search(matrix: &SquareMatrix, spec: &BlockSpec, restarts: usize, seed: u64) -> Result<BlockmodelResult> {
    LocalSearch::new(matrix, spec, restarts, seed).run()
}

/// Checks that the chosen block types of a result are optimal per block.
#[cfg(test)]
pub(crate) fn types_are_optimal(matrix: &SquareMatrix, result: &BlockmodelResult, spec: &BlockSpec) -> bool {
    use super::criterion::{best_type, block_cells};
    let cells = block_cells(matrix, result.partition.assignment(), spec.k, spec.diagonal);
    (0..spec.k).all(|r| {
        (0..spec.k).all(|c| best_type(&cells[r * spec.k + c], spec).0 == result.block_types[r][c])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmodel::criterion;
    use rand::Rng;
    use proptest::prelude::*;

    fn random_matrix(n: usize, seed: u64, max: u32) -> SquareMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f64::from(rng.gen_range(0..=max));
            }
        }
        m
    }

    fn planted_two_blocks() -> SquareMatrix {
        let mut m = SquareMatrix::zeros(8);
        let group = [0, 1, 0, 1, 1, 0, 0, 1];
        for i in 0..8 {
            for j in 0..8 {
                if i != j && group[i] == group[j] {
                    m[(i, j)] = 5.0;
                }
            }
        }
        m
    }

    #[test]
    fn sampler_covers_every_cluster() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..12 {
            for k in 1..=n {
                let a = random_partition(n, k, &mut rng);
                assert!(Partition::new(a, k).is_ok());
            }
        }
    }

    #[test]
    fn sampler_is_uniform_over_surjections() {
        // 3 nodes onto 2 labels: 6 surjections
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = std::collections::BTreeMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            *counts.entry(random_partition(3, 2, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (_, c) in counts {
            let share = c as f64 / draws as f64;
            assert!((share - 1.0 / 6.0).abs() < 0.01, "{share}");
        }
    }

    #[test]
    fn moment_evaluator_matches_full_evaluation() {
        for diagonal in [Diagonal::Ignore, Diagonal::Include] {
            for allowed in [
                vec![BlockType::Null, BlockType::Complete],
                vec![BlockType::Null],
                vec![BlockType::Complete],
            ] {
                for seed in 0..8 {
                    let n = 7 + seed as usize % 3;
                    let spec = BlockSpec::new(3, allowed.clone(), Measure::SumOfSquares, diagonal).unwrap();
                    let m = random_matrix(n, seed, 9);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
                    let assignment = random_partition(n, 3, &mut rng);
                    let mut fast = MomentEvaluator::new(&m, &spec);
                    let mut slow = FullEvaluator { matrix: &m, spec: &spec, assignment: vec![], total: 0.0 };
                    fast.reset(&assignment);
                    slow.reset(&assignment);
                    assert!((fast.total() - slow.total()).abs() < 1e-9);
                    for u in 0..n {
                        for to in 0..3 {
                            let (a, b) = (fast.relocation(u, to), slow.relocation(u, to));
                            assert!((a - b).abs() < 1e-9, "relocate {u}->{to}: {a} vs {b}");
                        }
                        for v in 0..n {
                            if assignment[u] != assignment[v] {
                                let (a, b) = (fast.exchange(u, v), slow.exchange(u, v));
                                assert!((a - b).abs() < 1e-9, "exchange {u},{v}: {a} vs {b}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn recovers_planted_blocks() {
        let m = planted_two_blocks();
        let spec = BlockSpec::null_complete(2).unwrap();
        let r = local_search(&m, &spec, 20, 1).unwrap();
        assert_eq!(r.criterion, 0.0);
        assert_eq!(r.partition.assignment(), [0, 1, 0, 1, 1, 0, 0, 1]);
        assert!(types_are_optimal(&m, &r, &spec));
    }

    #[test]
    fn n_equals_k_is_forced() {
        let m = random_matrix(4, 3, 9);
        let spec = BlockSpec::null_complete(4).unwrap();
        let r = local_search(&m, &spec, 3, 0).unwrap();
        assert_eq!(r.partition.assignment(), [0, 1, 2, 3]);
    }

    #[test]
    fn too_few_nodes() {
        let spec = BlockSpec::null_complete(3).unwrap();
        assert!(matches!(
            local_search(&SquareMatrix::zeros(2), &spec, 5, 0),
            Err(Error::TooFewNodes { n: 2, k: 3 })
        ));
        assert!(local_search(&SquareMatrix::zeros(4), &spec, 0, 0).is_err());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let m = random_matrix(12, 5, 9);
        let spec = BlockSpec::null_complete(3).unwrap();
        let a = local_search(&m, &spec, 10, 42).unwrap();
        let b = local_search(&m, &spec, 10, 42).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| local_search(&m, &spec, 10, 42)).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn engines_agree() {
        let m = random_matrix(9, 8, 9);
        let spec = BlockSpec::null_complete(3).unwrap();
        let fast = LocalSearch::new(&m, &spec, 5, 3).run().unwrap();
        let full = LocalSearch::new(&m, &spec, 5, 3).engine(SearchEngine::Full).run().unwrap();
        assert_eq!(fast.partition, full.partition);
        assert!((fast.criterion - full.criterion).abs() < 1e-9);
    }

    #[test]
    fn absolute_deviation_search() {
        let m = planted_two_blocks();
        let spec = BlockSpec::new(
            2,
            [BlockType::Null, BlockType::Complete],
            Measure::AbsoluteDeviation,
            Diagonal::Ignore,
        )
        .unwrap();
        let r = local_search(&m, &spec, 10, 9).unwrap();
        assert_eq!(r.criterion, 0.0);
    }

    #[test]
    fn result_reports_restarts() {
        let m = random_matrix(10, 1, 9);
        let spec = BlockSpec::null_complete(2).unwrap();
        let r = local_search(&m, &spec, 7, 0).unwrap();
        assert_eq!(r.restarts_run, 7);
        assert_eq!(r.restart_criteria.len(), 7);
        assert_eq!(r.restart_criteria[r.best_restart_index], r.criterion);
        let direct = criterion(&m, &r.partition, &spec).unwrap();
        assert_eq!(direct.criterion, r.criterion);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn local_optimum_has_no_improving_move(seed in 0u64..1000, n in 4usize..9, k in 2usize..4) {
            let m = random_matrix(n, seed, 9);
            let spec = BlockSpec::null_complete(k).unwrap();
            let r = local_search(&m, &spec, 1, seed).unwrap();
            let base = r.criterion;
            let a = r.partition.assignment().to_vec();
            let mut sizes = vec![0; k];
            for &c in &a { sizes[c] += 1; }
            for u in 0..n {
                for to in 0..k {
                    if to != a[u] && sizes[a[u]] > 1 {
                        let mut b = a.clone();
                        b[u] = to;
                        prop_assert!(!improves(criterion_value(&m, &b, &spec), base));
                    }
                }
                for v in u + 1..n {
                    let mut b = a.clone();
                    b.swap(u, v);
                    prop_assert!(!improves(criterion_value(&m, &b, &spec), base));
                }
            }
        }
    }
}
