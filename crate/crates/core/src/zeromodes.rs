//! The zero-mode Fock module.
//!
//! The algebra is generated by letters a^i_alpha (row i, group index
//! alpha) together with the commuting weight operators q^{p_j}, subject
//! to the quadratic exchange relations, the annihilation of the vacuum
//! by the rows i >= 2, and the n-linear quantum-determinant relation
//! det_q(a) = D_q(p).  Rather than postulating a monomial basis, the
//! module is built level by level: the image of each letter on the
//! current basis enters as an unknown vector, the defining relations
//! become exact linear constraints, and the constraint system is
//! row-reduced over the coefficient field.  Unconstrained images become
//! new basis states; constrained ones are stored as expressions.  Every
//! defining relation then holds on the nose, while the downstream
//! identities (intertwining, centrality, determinant factorization)
//! remain genuine theorems checked against this realization.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use thiserror::Error;

use crate::epsilon::{build_eps, EpsVariant};
use crate::field::{FieldMode, Scalar};
use crate::report::{fail, CheckResult, CheckStatus};
use crate::rmatrix::eps_sign;
use crate::tensor::SiteOperator;
use crate::weight::Weight;
use crate::Corruption;

/// (row i, group index alpha), both 1-based.
pub type Letter = (usize, usize);

#[derive(Debug, Error)]
pub enum ZeroModeError {
    #[error("state exceeds the solved depth of the module")]
    DepthExceeded,
    #[error("non-generic weight: {0}")]
    NonGenericWeight(String),
}

/// Sparse vector over the module basis, sorted by state id.
pub type SparseVec = Vec<(usize, Scalar)>;

#[derive(Debug, Clone)]
pub struct FockState {
    pub vec: SparseVec,
}

impl FockState {
    pub fn is_zero(&self) -> bool {
        self.vec.iter().all(|(_, c)| c.is_zero())
    }
}

#[derive(Debug, Clone)]
struct StateInfo {
    level: usize,
    weight: Weight,
    made_by: Option<(Letter, usize)>,
}

pub struct FockModule {
    pub mode: FieldMode,
    pub n: usize,
    /// Letters act on states of level < lmax.
    pub lmax: usize,
    states: Vec<StateInfo>,
    levels: Vec<Vec<usize>>,
    action: Vec<HashMap<usize, SparseVec>>,
    eps_upper: Vec<Scalar>,
    eps_lower_classical: Vec<Scalar>,
}

fn letter_idx(n: usize, l: Letter) -> usize {
    (l.0 - 1) * n + (l.1 - 1)
}

fn vec_scale(v: &[(usize, Scalar)], s: &Scalar) -> SparseVec {
    if s.is_structural_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, c)| (*i, c * s)).collect()
}

fn vec_add(a: &[(usize, Scalar)], b: &[(usize, Scalar)]) -> SparseVec {
    let mut out: SparseVec = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = &a[i].1 + &b[j].1;
                if !c.is_structural_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// One row of a level-solve system: unknown letter images plus a known
/// part supported on the already-built module.
#[derive(Debug, Clone, Default)]
struct Row {
    syms: BTreeMap<usize, Scalar>,
    known: BTreeMap<usize, Scalar>,
}

impl Row {
    fn add_sym(&mut self, sym: usize, c: &Scalar) {
        if c.is_structural_zero() {
            return;
        }
        match self.syms.entry(sym) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = &*e.get() + c;
                if v.is_structural_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    fn add_known(&mut self, id: usize, c: &Scalar) {
        if c.is_structural_zero() {
            return;
        }
        match self.known.entry(id) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = &*e.get() + c;
                if v.is_structural_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    fn is_trivial(&self) -> bool {
        self.syms.is_empty() && self.known.is_empty()
    }
}

/// Gauss-Jordan reducer over the symbol space.  Pivot rows are kept
/// fully reduced against each other; pivots are chosen as the largest
/// symbol with a provably nonzero coefficient.
struct Reducer {
    pivots: BTreeMap<usize, Row>,
}

impl Reducer {
    fn new() -> Self {
        Reducer {
            pivots: BTreeMap::new(),
        }
    }

    fn insert(&mut self, mut row: Row) -> Result<(), String> {
        loop {
            let hit = row
                .syms
                .keys()
                .rev()
                .find(|s| self.pivots.contains_key(s))
                .cloned();
            match hit {
                None => break,
                Some(s) => {
                    let c = row.syms.get(&s).unwrap().clone();
                    row.syms.remove(&s);
                    let piv = self.pivots.get(&s).unwrap().clone();
                    // subtract c * pivot row (whose pivot coefficient is 1)
                    let mut tmp = piv;
                    tmp.syms.remove(&s);
                    for (k, v) in &tmp.syms {
                        row.add_sym(*k, &(&(-&c) * v));
                    }
                    for (k, v) in &tmp.known {
                        row.add_known(*k, &(&(-&c) * v));
                    }
                }
            }
        }
        // pick the largest symbol with nonzero coefficient as pivot
        let pivot = loop {
            let cand = row.syms.keys().rev().next().cloned();
            match cand {
                None => {
                    for (_, v) in &row.known {
                        if !v.is_zero() {
                            return Err("inconsistent relation system".into());
                        }
                    }
                    return Ok(());
                }
                Some(s) => {
                    if row.syms.get(&s).unwrap().is_zero() {
                        row.syms.remove(&s);
                        continue;
                    }
                    break s;
                }
            }
        };
        let c = row.syms.get(&pivot).unwrap().clone();
        let inv = c.inv().expect("pivot is nonzero");
        let mut norm = Row::default();
        for (k, v) in &row.syms {
            norm.add_sym(*k, &(v * &inv));
        }
        for (k, v) in &row.known {
            norm.add_known(*k, &(v * &inv));
        }
        // eliminate the new pivot from existing pivot rows
        let holders: Vec<usize> = self
            .pivots
            .iter()
            .filter(|(_, r)| r.syms.contains_key(&pivot))
            .map(|(p, _)| *p)
            .collect();
        for h in holders {
            let mut r = self.pivots.remove(&h).unwrap();
            let c = r.syms.remove(&pivot).unwrap();
            let mut tmp = norm.clone();
            tmp.syms.remove(&pivot);
            for (k, v) in &tmp.syms {
                r.add_sym(*k, &(&(-&c) * v));
            }
            for (k, v) in &tmp.known {
                r.add_known(*k, &(&(-&c) * v));
            }
            self.pivots.insert(h, r);
        }
        self.pivots.insert(pivot, norm);
        Ok(())
    }
}

impl FockModule {
    /// Build the module with letters solved on all states of level < lmax.
    pub fn build(mode: &FieldMode, lmax: usize) -> Result<FockModule, ZeroModeError> {
        let n = mode.n();
        let eps_upper =
            build_eps(mode, EpsVariant::ConstantUpper, None, Corruption::None).expect("constant");
        let eps_lower =
            build_eps(mode, EpsVariant::DynamicalLower, None, Corruption::None).expect("classical");
        let mut module = FockModule {
            mode: mode.clone(),
            n,
            lmax,
            states: vec![StateInfo {
                level: 0,
                weight: Weight::vacuum(n),
                made_by: None,
            }],
            levels: vec![vec![0]],
            action: vec![HashMap::new(); n * n],
            eps_upper: eps_upper.vals,
            eps_lower_classical: eps_lower.vals,
        };
        for level in 1..=lmax {
            module.solve_level(level)?;
        }
        Ok(module)
    }

    fn solve_level(&mut self, level: usize) -> Result<(), ZeroModeError> {
        let n = self.n;
        let frontier: Vec<usize> = self.levels[level - 1].clone();
        let fpos: HashMap<usize, usize> = frontier
            .iter()
            .enumerate()
            .map(|(k, id)| (*id, k))
            .collect();
        let sym_of = |li: usize, fp: usize| li * frontier.len() + fp;

        let apply_symbolic = |row: &mut Row, li: usize, v: &SparseVec, scale: &Scalar| {
            for (id, c) in v {
                let co = c * scale;
                if co.is_structural_zero() {
                    continue;
                }
                if let Some(fp) = fpos.get(id) {
                    row.add_sym(sym_of(li, *fp), &co);
                } else {
                    let img = self.action[li].get(id).expect("lower level solved");
                    for (jid, jc) in img {
                        row.add_known(*jid, &(jc * &co));
                    }
                }
            }
        };

        let mut reducer = Reducer::new();
        let push = |r: Row, reducer: &mut Reducer| -> Result<(), ZeroModeError> {
            if r.is_trivial() {
                return Ok(());
            }
            reducer
                .insert(r)
                .map_err(|e| ZeroModeError::NonGenericWeight(format!("level {level}: {e}")))
        };

        if level == 1 {
            for i in 2..=n {
                for a in 1..=n {
                    let mut r = Row::default();
                    r.add_sym(sym_of(letter_idx(n, (i, a)), 0), &self.mode.one());
                    push(r, &mut reducer)?;
                }
            }
        }

        if level >= 2 {
            for &u in &self.levels[level - 2].clone() {
                let wu = self.states[u].weight.clone();
                // cross-row exchange, distinct group indices:
                // [p_IJ - 1] a^J_a a^I_b - [p_IJ] a^I_b a^J_a
                //   + q^{eps_ba p_IJ} a^I_a a^J_b = 0  on u
                for iu in 1..=n {
                    for ju in 1..=n {
                        if iu == ju {
                            continue;
                        }
                        let pij = wu.p_diff(iu, ju);
                        for a in 1..=n {
                            for b in 1..=n {
                                if a == b {
                                    continue;
                                }
                                let mut r = Row::default();
                                let inner = self.action[letter_idx(n, (iu, b))][&u].clone();
                                apply_symbolic(
                                    &mut r,
                                    letter_idx(n, (ju, a)),
                                    &inner,
                                    &self.mode.qint(pij - 1),
                                );
                                let inner = self.action[letter_idx(n, (ju, a))][&u].clone();
                                apply_symbolic(
                                    &mut r,
                                    letter_idx(n, (iu, b)),
                                    &inner,
                                    &(-&self.mode.qint(pij)),
                                );
                                let inner = self.action[letter_idx(n, (ju, b))][&u].clone();
                                apply_symbolic(
                                    &mut r,
                                    letter_idx(n, (iu, a)),
                                    &inner,
                                    &self.mode.q_int_pow(eps_sign(b, a) * pij),
                                );
                                push(r, &mut reducer)?;
                            }
                        }
                    }
                }
                // equal group index on distinct rows: commutator vanishes
                for iu in 1..=n {
                    for ju in iu + 1..=n {
                        for a in 1..=n {
                            let mut r = Row::default();
                            let inner = self.action[letter_idx(n, (iu, a))][&u].clone();
                            apply_symbolic(&mut r, letter_idx(n, (ju, a)), &inner, &self.mode.one());
                            let inner = self.action[letter_idx(n, (ju, a))][&u].clone();
                            apply_symbolic(
                                &mut r,
                                letter_idx(n, (iu, a)),
                                &inner,
                                &(-&self.mode.one()),
                            );
                            push(r, &mut reducer)?;
                        }
                    }
                }
                // same row: a^I_a a^I_b = q^{eps_ab} a^I_b a^I_a
                for iu in 1..=n {
                    for a in 1..=n {
                        for b in 1..=n {
                            if a == b {
                                continue;
                            }
                            let mut r = Row::default();
                            let inner = self.action[letter_idx(n, (iu, b))][&u].clone();
                            apply_symbolic(&mut r, letter_idx(n, (iu, a)), &inner, &self.mode.one());
                            let inner = self.action[letter_idx(n, (iu, a))][&u].clone();
                            apply_symbolic(
                                &mut r,
                                letter_idx(n, (iu, b)),
                                &inner,
                                &(-&self.mode.q_int_pow(eps_sign(a, b))),
                            );
                            push(r, &mut reducer)?;
                        }
                    }
                }
            }
        }

        // determinant relation: [n]! (det_q(a) - D_q(p)) b = 0 for b n levels down
        if level >= n {
            for &b in &self.levels[level - n].clone() {
                let mut r = Row::default();
                for rows_perm in (1..=n).permutations(n) {
                    let ei = self.eps_lower_classical
                        [SiteOperator::index_of(n, &rows_perm)]
                    .clone();
                    if ei.is_structural_zero() {
                        continue;
                    }
                    for cols_perm in (1..=n).permutations(n) {
                        let ea = self.eps_upper[SiteOperator::index_of(n, &cols_perm)].clone();
                        if ea.is_structural_zero() {
                            continue;
                        }
                        // apply letters n..2 (known), then letter 1 symbolically
                        let mut v: SparseVec = vec![(b, self.mode.one())];
                        for k in (1..n).rev() {
                            let li = letter_idx(n, (rows_perm[k], cols_perm[k]));
                            let mut acc: SparseVec = Vec::new();
                            for (id, c) in &v {
                                let img = self.action[li].get(id).expect("solved");
                                acc = vec_add(&acc, &vec_scale(img, c));
                            }
                            v = acc;
                        }
                        apply_symbolic(
                            &mut r,
                            letter_idx(n, (rows_perm[0], cols_perm[0])),
                            &v,
                            &(&ei * &ea),
                        );
                    }
                }
                let dq = self.states[b].weight.dq(&self.mode);
                let fact = self.mode.qfact(n as u32);
                r.add_known(b, &(-&(&fact * &dq)));
                push(r, &mut reducer)?;
            }
        }

        // free symbols become new basis states, pivot symbols expressions
        let mut sym_state: HashMap<usize, usize> = HashMap::new();
        let mut born = Vec::new();
        for fp in 0..frontier.len() {
            for li in 0..n * n {
                let s = sym_of(li, fp);
                if reducer.pivots.contains_key(&s) {
                    continue;
                }
                let parent = frontier[fp];
                let l = ((li / n) + 1, (li % n) + 1);
                let id = self.states.len();
                self.states.push(StateInfo {
                    level,
                    weight: self.states[parent].weight.add_box(l.0),
                    made_by: Some((l, parent)),
                });
                sym_state.insert(s, id);
                born.push(id);
            }
        }
        for fp in 0..frontier.len() {
            for li in 0..n * n {
                let s = sym_of(li, fp);
                let image: SparseVec = match reducer.pivots.get(&s) {
                    None => vec![(sym_state[&s], self.mode.one())],
                    Some(row) => {
                        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                        for (k, v) in &row.syms {
                            if *k == s {
                                continue;
                            }
                            let st = sym_state[k];
                            let neg = -v;
                            acc.entry(st)
                                .and_modify(|e| *e = &*e + &neg)
                                .or_insert(neg);
                        }
                        for (k, v) in &row.known {
                            let neg = -v;
                            acc.entry(*k)
                                .and_modify(|e| *e = &*e + &neg)
                                .or_insert(neg);
                        }
                        acc.into_iter()
                            .filter(|(_, c)| !c.is_structural_zero())
                            .collect()
                    }
                };
                self.action[li].insert(frontier[fp], image);
            }
        }
        self.levels.push(born);
        Ok(())
    }

    pub fn basis_len(&self) -> usize {
        self.states.len()
    }

    pub fn level_of(&self, id: usize) -> usize {
        self.states[id].level
    }

    pub fn made_by(&self, id: usize) -> Option<(Letter, usize)> {
        self.states[id].made_by
    }

    pub fn weight_of_basis(&self, id: usize) -> &Weight {
        &self.states[id].weight
    }

    pub fn level_count(&self, level: usize) -> usize {
        self.levels.get(level).map(|v| v.len()).unwrap_or(0)
    }

    pub fn vacuum(&self) -> FockState {
        FockState {
            vec: vec![(0, self.mode.one())],
        }
    }

    /// Weight of a state; None for zero or weight-inhomogeneous vectors.
    pub fn weight_of(&self, s: &FockState) -> Option<Weight> {
        let mut w: Option<Weight> = None;
        for (id, c) in &s.vec {
            if c.is_zero() {
                continue;
            }
            match &w {
                None => w = Some(self.states[*id].weight.clone()),
                Some(prev) => {
                    if prev != &self.states[*id].weight {
                        return None;
                    }
                }
            }
        }
        w
    }

    pub fn apply_letter(&self, l: Letter, s: &FockState) -> Result<FockState, ZeroModeError> {
        assert!((1..=self.n).contains(&l.0) && (1..=self.n).contains(&l.1));
        let li = letter_idx(self.n, l);
        let mut acc: SparseVec = Vec::new();
        for (id, c) in &s.vec {
            if c.is_structural_zero() {
                continue;
            }
            let img = self.action[li].get(id).ok_or(ZeroModeError::DepthExceeded)?;
            acc = vec_add(&acc, &vec_scale(img, c));
        }
        Ok(FockState { vec: acc })
    }

    /// Apply an operator word; the rightmost letter acts first.
    pub fn apply_word(&self, word: &[Letter], s: &FockState) -> Result<FockState, ZeroModeError> {
        let mut cur = s.clone();
        for l in word.iter().rev() {
            cur = self.apply_letter(*l, &cur)?;
        }
        Ok(cur)
    }

    /// q^{sign p_j}, acting diagonally in the weight grading.
    pub fn apply_qp(&self, j: usize, sign: i64, s: &FockState) -> FockState {
        let vec = s
            .vec
            .iter()
            .map(|(id, c)| {
                let f = self.states[*id].weight.q_pow_p(&self.mode, j, sign);
                (*id, c * &f)
            })
            .collect();
        FockState { vec }
    }

    /// Multiply each component by a function of its weight.
    pub fn apply_weight_fn<F>(&self, s: &FockState, f: F) -> FockState
    where
        F: Fn(&Weight) -> Scalar,
    {
        let vec = s
            .vec
            .iter()
            .map(|(id, c)| (*id, c * &f(&self.states[*id].weight)))
            .collect();
        FockState { vec }
    }

    pub fn add(&self, a: &FockState, b: &FockState) -> FockState {
        FockState {
            vec: vec_add(&a.vec, &b.vec),
        }
    }

    pub fn scale(&self, a: &FockState, s: &Scalar) -> FockState {
        FockState {
            vec: vec_scale(&a.vec, s),
        }
    }

    pub fn sub(&self, a: &FockState, b: &FockState) -> FockState {
        self.add(a, &self.scale(b, &self.mode.from_int(-1)))
    }

    pub fn eq_states(&self, a: &FockState, b: &FockState) -> bool {
        self.sub(a, b).is_zero()
    }

    pub fn basis_name(&self, id: usize) -> String {
        let mut parts = Vec::new();
        let mut cur = id;
        loop {
            match &self.states[cur].made_by {
                None => break,
                Some((l, parent)) => {
                    parts.push(format!("a[{},{}]", l.0, l.1));
                    cur = *parent;
                }
            }
        }
        if parts.is_empty() {
            "|0>".into()
        } else {
            format!("{}|0>", parts.join(""))
        }
    }

    pub fn state_brief(&self, s: &FockState) -> String {
        if s.vec.is_empty() {
            return "0".into();
        }
        let mut out = s
            .vec
            .iter()
            .take(3)
            .map(|(id, c)| format!("({c})*{}", self.basis_name(*id)))
            .collect::<Vec<_>>()
            .join(" + ");
        if s.vec.len() > 3 {
            out.push_str(" + ...");
        }
        out
    }

    /// det_q(a) = (1/[n]!) eps_{i..} a^{i_1}_{a_1} .. a^{i_n}_{a_n} eps^{a..}.
    pub fn detq_a(&self, s: &FockState) -> Result<FockState, ZeroModeError> {
        let n = self.n;
        let fact_inv = self
            .mode
            .qfact(n as u32)
            .inv()
            .ok_or_else(|| ZeroModeError::NonGenericWeight("[n]! = 0".into()))?;
        let mut acc = FockState { vec: Vec::new() };
        for rows_perm in (1..=n).permutations(n) {
            let ei = &self.eps_lower_classical[SiteOperator::index_of(n, &rows_perm)];
            if ei.is_structural_zero() {
                continue;
            }
            for cols_perm in (1..=n).permutations(n) {
                let ea = &self.eps_upper[SiteOperator::index_of(n, &cols_perm)];
                let word: Vec<Letter> = rows_perm
                    .iter()
                    .zip(cols_perm.iter())
                    .map(|(&i, &a)| (i, a))
                    .collect();
                let v = self.apply_word(&word, s)?;
                acc = self.add(&acc, &self.scale(&v, &(ei * ea)));
            }
        }
        Ok(self.scale(&acc, &fact_inv))
    }

    pub fn dq_at(&self, s: &FockState) -> Option<Scalar> {
        self.weight_of(s).map(|w| w.dq(&self.mode))
    }
}

/// All distinct states reached by words of length <= maxlen, normalized
/// so that proportional states are collected once.  In cyclotomic mode
/// the walk is restricted to the weight window 0 < p_ij < h, where the
/// dynamical denominators stay invertible.
pub fn corpus(module: &FockModule, maxlen: usize) -> Vec<FockState> {
    let n = module.n;
    let height = module.mode.height();
    let in_window = |s: &FockState| -> bool {
        let Some(h) = height else { return true };
        match module.weight_of(s) {
            None => true,
            Some(w) => (1..=n).all(|i| {
                (i + 1..=n).all(|j| {
                    let p = w.p_diff(i, j);
                    p > 0 && p < h as i64
                })
            }),
        }
    };
    let mut seen: BTreeMap<String, FockState> = BTreeMap::new();
    let key_of = |m: &FockModule, s: &FockState| -> Option<String> {
        let lead = s.vec.iter().find(|(_, c)| !c.is_zero())?;
        let inv = lead.1.inv().unwrap();
        let norm: Vec<String> = s
            .vec
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(id, c)| format!("{id}:{}", (c * &inv)))
            .collect();
        let _ = m;
        Some(norm.join(";"))
    };
    let vac = module.vacuum();
    seen.insert(key_of(module, &vac).unwrap(), vac.clone());
    let mut frontier = vec![vac];
    for _ in 0..maxlen {
        let mut next = Vec::new();
        for s in &frontier {
            for i in 1..=n {
                for a in 1..=n {
                    if let Ok(t) = module.apply_letter((i, a), s) {
                        if !in_window(&t) {
                            continue;
                        }
                        if let Some(k) = key_of(module, &t) {
                            if !seen.contains_key(&k) {
                                seen.insert(k, t.clone());
                                next.push(t);
                            }
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    seen.into_values().collect()
}

/// Every exchange relation evaluated on every corpus state.
pub fn check_relations(module: &FockModule, states: &[FockState]) -> CheckResult {
    let n = module.n;
    let m = &module.mode;
    for (si, s) in states.iter().enumerate() {
        let Some(w) = module.weight_of(s) else { continue };
        let ap = |l: Letter, v: &FockState| module.apply_letter(l, v);
        for iu in 1..=n {
            for ju in 1..=n {
                if iu == ju {
                    continue;
                }
                let pij = w.p_diff(iu, ju);
                for a in 1..=n {
                    for b in 1..=n {
                        if a == b {
                            continue;
                        }
                        let t1 = ap((ju, a), &ap((iu, b), s).map_err(depth_skip)?)
                            .map_err(depth_skip)?;
                        let t2 = ap((iu, b), &ap((ju, a), s).map_err(depth_skip)?)
                            .map_err(depth_skip)?;
                        let t3 = ap((iu, a), &ap((ju, b), s).map_err(depth_skip)?)
                            .map_err(depth_skip)?;
                        let lhs = module.scale(&t1, &m.qint(pij - 1));
                        let rhs = module.add(
                            &module.scale(&t2, &m.qint(pij)),
                            &module.scale(&t3, &(-&m.q_int_pow(eps_sign(b, a) * pij))),
                        );
                        if !module.eq_states(&lhs, &rhs) {
                            return Err(fail(
                                format!(
                                    "exchange (i={iu},j={ju},a={a},b={b}) on state #{si}"
                                ),
                                module.state_brief(&lhs),
                                module.state_brief(&rhs),
                            ));
                        }
                    }
                }
                if iu < ju {
                    for a in 1..=n {
                        let t1 = ap((ju, a), &ap((iu, a), s).map_err(depth_skip)?)
                            .map_err(depth_skip)?;
                        let t2 = ap((iu, a), &ap((ju, a), s).map_err(depth_skip)?)
                            .map_err(depth_skip)?;
                        if !module.eq_states(&t1, &t2) {
                            return Err(fail(
                                format!("commutator (i={iu},j={ju},a={a}) on state #{si}"),
                                module.state_brief(&t1),
                                module.state_brief(&t2),
                            ));
                        }
                    }
                }
            }
            for a in 1..=n {
                for b in 1..=n {
                    if a == b {
                        continue;
                    }
                    let t1 = ap((iu, a), &ap((iu, b), s).map_err(depth_skip)?)
                        .map_err(depth_skip)?;
                    let t2 = ap((iu, b), &ap((iu, a), s).map_err(depth_skip)?)
                        .map_err(depth_skip)?;
                    let rhs = module.scale(&t2, &m.q_int_pow(eps_sign(a, b)));
                    if !module.eq_states(&t1, &rhs) {
                        return Err(fail(
                            format!("same-row (i={iu},a={a},b={b}) on state #{si}"),
                            module.state_brief(&t1),
                            module.state_brief(&rhs),
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn depth_skip(_: ZeroModeError) -> CheckStatus {
    CheckStatus::Skipped {
        reason: "corpus state too deep for the solved module".into(),
    }
}

/// q^{p}-relations: the product of all q^{p_j} is the identity and the
/// exchange rule with the letters holds.
pub fn check_qp_relations(module: &FockModule, states: &[FockState]) -> CheckResult {
    let n = module.n;
    for (si, s) in states.iter().enumerate() {
        let mut acc = s.clone();
        for j in 1..=n {
            acc = module.apply_qp(j, 1, &acc);
        }
        if !module.eq_states(&acc, s) {
            return Err(fail(
                format!("prod_j q^(p_j) on state #{si}"),
                module.state_brief(&acc),
                module.state_brief(s),
            ));
        }
        for j in 1..=n {
            for i in 1..=n {
                for a in 1..=n {
                    let lhs = match module.apply_letter((i, a), s) {
                        Ok(v) => module.apply_qp(j, 1, &v),
                        Err(_) => return Err(depth_skip(ZeroModeError::DepthExceeded)),
                    };
                    // a^i_a q^{p_j + d^i_j - 1/n}: scalar on the incoming state
                    let shift = if i == j { 1 } else { 0 };
                    let scaled = module.apply_weight_fn(s, |w| {
                        let base = w.q_pow_p(&module.mode, j, 1);
                        // q^{d - 1/n} = qpow(4n d - 4)
                        let extra = module.mode.qpow(4 * n as i64 * shift - 4);
                        &base * &extra
                    });
                    let rhs = module
                        .apply_letter((i, a), &scaled)
                        .map_err(depth_skip)?;
                    if !module.eq_states(&lhs, &rhs) {
                        return Err(fail(
                            format!("qp exchange (j={j},i={i},a={a}) on state #{si}"),
                            module.state_brief(&lhs),
                            module.state_brief(&rhs),
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Ice-form exchange relation with the dynamical R-matrix evaluated at
/// the output weight:
/// q^{1/n}(a_ij a^j_a a^i_b + b_ij a^i_a a^j_b) = sum R^{a'b'}_{ab} a^i_{a'} a^j_{b'};
/// exercises the braid property of the dynamical matrix on the module.
pub fn check_dynamical_exchange(module: &FockModule, states: &[FockState]) -> CheckResult {
    let n = module.n;
    let m = &module.mode;
    let rhat = crate::rmatrix::build_rhat(m, Corruption::None);
    let pref = crate::rmatrix::q_nth_root(m);
    for (si, s) in states.iter().enumerate() {
        let Some(w) = module.weight_of(s) else { continue };
        for i in 1..=n {
            for j in 1..=n {
                for a in 1..=n {
                    for b in 1..=n {
                        let (a_ij, b_ij) = if i == j {
                            (m.q_int_pow(-1), m.zero())
                        } else {
                            let pij = w.p_diff(i, j);
                            let inv = match m.qint(pij).inv() {
                                Some(v) => v,
                                None => {
                                    return Err(CheckStatus::Skipped {
                                        reason: format!(
                                            "SingularWeight: [p_{i}{j}] = 0 on state #{si}"
                                        ),
                                    })
                                }
                            };
                            (
                                &m.qint(pij - 1) * &inv,
                                &m.q_int_pow(-pij) * &inv,
                            )
                        };
                        let w1 = module
                            .apply_word(&[(j, a), (i, b)], s)
                            .map_err(depth_skip)?;
                        let w2 = module
                            .apply_word(&[(i, a), (j, b)], s)
                            .map_err(depth_skip)?;
                        let lhs = module.scale(
                            &module.add(
                                &module.scale(&w1, &a_ij),
                                &module.scale(&w2, &b_ij),
                            ),
                            &pref,
                        );
                        let mut rhs = FockState { vec: Vec::new() };
                        for ap in 1..=n {
                            for bp in 1..=n {
                                let r = rhat.entry(
                                    SiteOperator::index_of(n, &[ap, bp]),
                                    SiteOperator::index_of(n, &[a, b]),
                                );
                                if r.is_structural_zero() {
                                    continue;
                                }
                                let v = module
                                    .apply_word(&[(i, ap), (j, bp)], s)
                                    .map_err(depth_skip)?;
                                rhs = module.add(&rhs, &module.scale(&v, r));
                            }
                        }
                        if !module.eq_states(&lhs, &rhs) {
                            return Err(fail(
                                format!("ice exchange (i={i},j={j},a={a},b={b}) state #{si}"),
                                module.state_brief(&lhs),
                                module.state_brief(&rhs),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Order independence of three-letter reductions across distinct rows:
/// rewriting the outer pair first agrees with direct evaluation.
pub fn check_confluence(module: &FockModule, states: &[FockState]) -> CheckResult {
    let n = module.n;
    let m = &module.mode;
    for (si, s) in states.iter().enumerate() {
        for l3 in (1..=n).cartesian_product(1..=n) {
            let inner = module.apply_letter(l3, s).map_err(depth_skip)?;
            let Some(w) = module.weight_of(&inner) else { continue };
            for i in 1..=n {
                for j in 1..=n {
                    if i == j || l3.0 == i || l3.0 == j {
                        continue;
                    }
                    let pij = w.p_diff(i, j);
                    for a in 1..=n {
                        for b in 1..=n {
                            if a == b {
                                continue;
                            }
                            // direct: a^j_a a^i_b (inner)
                            let direct = module
                                .apply_word(&[(j, a), (i, b)], &inner)
                                .map_err(depth_skip)?;
                            // via the exchange relation solved for the pair
                            let div = m.qint(pij - 1);
                            let Some(div_inv) = div.inv() else {
                                continue; // degenerate stratum: relation is a constraint
                            };
                            let t2 = module
                                .apply_word(&[(i, b), (j, a)], &inner)
                                .map_err(depth_skip)?;
                            let t3 = module
                                .apply_word(&[(i, a), (j, b)], &inner)
                                .map_err(depth_skip)?;
                            let recombined = module.scale(
                                &module.add(
                                    &module.scale(&t2, &m.qint(pij)),
                                    &module.scale(
                                        &t3,
                                        &(-&m.q_int_pow(eps_sign(b, a) * pij)),
                                    ),
                                ),
                                &div_inv,
                            );
                            if !module.eq_states(&direct, &recombined) {
                                return Err(fail(
                                    format!(
                                        "confluence (l3={l3:?},i={i},j={j},a={a},b={b}) state #{si}"
                                    ),
                                    module.state_brief(&direct),
                                    module.state_brief(&recombined),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// det_q(a) s = D_q(p(s)) s on every corpus state.
pub fn check_detq(module: &FockModule, states: &[FockState]) -> CheckResult {
    for (si, s) in states.iter().enumerate() {
        let det = module.detq_a(s).map_err(depth_skip)?;
        let dq = module.apply_weight_fn(s, |w| w.dq(&module.mode));
        if !module.eq_states(&det, &dq) {
            return Err(fail(
                format!("det_q(a) on state #{si}"),
                module.state_brief(&det),
                module.state_brief(&dq),
            ));
        }
    }
    Ok(())
}

/// Both intertwining relations between the constant and the dynamical
/// epsilon tensors through the n-fold product of zero modes.
pub fn check_intertwining(
    module: &FockModule,
    states: &[FockState],
    corrupt: Corruption,
) -> CheckResult {
    let n = module.n;
    let m = &module.mode;
    let upper = build_eps(m, EpsVariant::ConstantUpper, None, corrupt).unwrap();
    let lower = build_eps(m, EpsVariant::ConstantLower, None, corrupt).unwrap();
    let dlower = build_eps(m, EpsVariant::DynamicalLower, None, corrupt).unwrap();
    for (si, s) in states.iter().enumerate() {
        let det = module.detq_a(s).map_err(depth_skip)?;
        let weight = module.weight_of(s);
        // relation 1: sum_i eps_{i..} a^{i_1}_{a_1}..a^{i_n}_{a_n} = det_q(a) eps_{a..}
        for cols in (1..=n).permutations(n).chain(degenerate_tuples(n)) {
            let mut lhs = FockState { vec: Vec::new() };
            for rows_perm in (1..=n).permutations(n) {
                let ei = &dlower.vals[SiteOperator::index_of(n, &rows_perm)];
                if ei.is_structural_zero() {
                    continue;
                }
                let word: Vec<Letter> = rows_perm
                    .iter()
                    .zip(cols.iter())
                    .map(|(&i, &a)| (i, a))
                    .collect();
                let v = module.apply_word(&word, s).map_err(depth_skip)?;
                lhs = module.add(&lhs, &module.scale(&v, ei));
            }
            let rhs = module.scale(&det, &lower.vals[SiteOperator::index_of(n, &cols)]);
            if !module.eq_states(&lhs, &rhs) {
                return Err(fail(
                    format!("intertwining-1 cols {cols:?} state #{si}"),
                    module.state_brief(&lhs),
                    module.state_brief(&rhs),
                ));
            }
        }
        // relation 2: a^{i_1}_{a_1}..a^{i_n}_{a_n} eps^{a..} = eps^{i..}(p) det_q(a)
        let dupper = match &weight {
            Some(w) => match build_eps(m, EpsVariant::DynamicalUpper, Some(w), corrupt) {
                Ok(t) => t,
                Err(_) => {
                    return Err(CheckStatus::Skipped {
                        reason: format!("SingularWeight for dynamical tensor on state #{si}"),
                    })
                }
            },
            None => continue,
        };
        for rows in (1..=n).permutations(n).chain(degenerate_tuples(n)) {
            let mut lhs = FockState { vec: Vec::new() };
            for cols_perm in (1..=n).permutations(n) {
                let ea = &upper.vals[SiteOperator::index_of(n, &cols_perm)];
                if ea.is_structural_zero() {
                    continue;
                }
                let word: Vec<Letter> = rows
                    .iter()
                    .zip(cols_perm.iter())
                    .map(|(&i, &a)| (i, a))
                    .collect();
                let v = module.apply_word(&word, s).map_err(depth_skip)?;
                lhs = module.add(&lhs, &module.scale(&v, ea));
            }
            let rhs = module.scale(&det, &dupper.vals[SiteOperator::index_of(n, &rows)]);
            if !module.eq_states(&lhs, &rhs) {
                return Err(fail(
                    format!("intertwining-2 rows {rows:?} state #{si}"),
                    module.state_brief(&lhs),
                    module.state_brief(&rhs),
                ));
            }
        }
    }
    Ok(())
}

/// A few index tuples with repeats, on which both intertwiners vanish.
fn degenerate_tuples(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![1; n]];
    let mut t: Vec<usize> = (1..=n).collect();
    t[0] = n;
    out.push(t);
    out
}

/// Centrality: q^{p_i} commutes with det_q(a), and det_q(a)/D_q(p)
/// commutes with every letter (checked in cross-multiplied form).
pub fn check_centrality(module: &FockModule, states: &[FockState]) -> CheckResult {
    let n = module.n;
    for (si, s) in states.iter().enumerate() {
        let det = module.detq_a(s).map_err(depth_skip)?;
        for j in 1..=n {
            let lhs = module.apply_qp(j, 1, &det);
            let rhs = module.detq_a(&module.apply_qp(j, 1, s)).map_err(depth_skip)?;
            if !module.eq_states(&lhs, &rhs) {
                return Err(fail(
                    format!("[q^p_{j}, det_q(a)] on state #{si}"),
                    module.state_brief(&lhs),
                    module.state_brief(&rhs),
                ));
            }
        }
        let dq_s = match module.dq_at(s) {
            Some(v) => v,
            None => continue,
        };
        for i in 1..=n {
            for a in 1..=n {
                let as_ = module.apply_letter((i, a), s).map_err(depth_skip)?;
                let det_as = module.detq_a(&as_).map_err(depth_skip)?;
                let a_det = module.apply_letter((i, a), &det).map_err(depth_skip)?;
                let dq_as = match module.dq_at(&as_) {
                    Some(v) => v,
                    None => continue,
                };
                // det(a s) D(p(s)) = a det(s) D(p(a s))
                let lhs = module.scale(&det_as, &dq_s);
                let rhs = module.scale(&a_det, &dq_as);
                if !module.eq_states(&lhs, &rhs) {
                    return Err(fail(
                        format!("central ratio vs a[{i},{a}] on state #{si}"),
                        module.state_brief(&lhs),
                        module.state_brief(&rhs),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Shifted-weight bookkeeping for a word: Dynkin labels and the
/// integrability predicate at height h.
pub fn weight_spectrum(
    module: &FockModule,
    word: &[Letter],
    h: usize,
) -> Result<(Weight, Vec<i64>, bool), ZeroModeError> {
    let s = module.apply_word(word, &module.vacuum())?;
    let w = module
        .weight_of(&s)
        .unwrap_or_else(|| {
            // zero state: weight read from pure box-counting instead
            let mut w = Weight::vacuum(module.n);
            for l in word {
                w = w.add_box(l.0);
            }
            w
        });
    let dynkin = w.dynkin();
    let ok = w.is_integrable(h);
    Ok((w, dynkin, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn module(n: usize, lmax: usize) -> FockModule {
        FockModule::build(&FieldMode::generic_q(n), lmax).unwrap()
    }

    #[test]
    fn vacuum_annihilated_by_high_rows() {
        let m = module(2, 2);
        for i in 2..=2 {
            for a in 1..=2 {
                let v = m.apply_letter((i, a), &m.vacuum()).unwrap();
                assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn row_one_letters_are_free_at_level_one() {
        let m = module(2, 2);
        assert_eq!(m.level_count(1), 2);
        let m3 = module(3, 2);
        assert_eq!(m3.level_count(1), 3);
    }

    #[test]
    fn level_two_dimensions_match_young_structure() {
        // n=2: symmetric square (3 states); the mixed column collapses
        // onto the vacuum line through the determinant relation.
        let m = module(2, 2);
        assert_eq!(m.level_count(2), 3);
        // n=3: symmetric square (6) plus the antisymmetric square (3)
        let m3 = module(3, 2);
        assert_eq!(m3.level_count(2), 9);
    }

    #[test]
    fn detq_vacuum_values() {
        let m2 = module(2, 2);
        let det = m2.detq_a(&m2.vacuum()).unwrap();
        assert!(m2.eq_states(&det, &m2.vacuum()));
        let m3 = module(3, 3);
        let det = m3.detq_a(&m3.vacuum()).unwrap();
        let want = m3.scale(&m3.vacuum(), &m3.mode.qint(2));
        assert!(m3.eq_states(&det, &want));
    }

    #[test]
    fn mixed_pair_reduces_to_vacuum_multiple_n2() {
        let m = module(2, 2);
        let s = m.apply_word(&[(2, 2), (1, 1)], &m.vacuum()).unwrap();
        assert!(!s.is_zero());
        assert_eq!(s.vec.len(), 1);
        assert_eq!(s.vec[0].0, 0); // proportional to the vacuum
        // and with the expected q-power
        assert!(s.vec[0].1.eq_exact(&m.mode.qpow(-4)));
    }

    #[test]
    fn relations_hold_on_small_corpus() {
        let m = module(2, 4);
        let states = corpus(&m, 2);
        assert!(check_relations(&m, &states).is_ok());
        assert!(check_qp_relations(&m, &states).is_ok());
        assert!(check_dynamical_exchange(&m, &states).is_ok());
    }

    #[test]
    fn weight_spectrum_examples() {
        let m = module(2, 3);
        let (w, dynkin, ok) = weight_spectrum(&m, &[], 3).unwrap();
        assert_eq!(w, Weight::vacuum(2));
        assert_eq!(dynkin, vec![0]);
        assert!(ok);
        // two boxes in row 1 at h=3: p_12 = 3 breaks integrability
        let (_, dynkin, ok) = weight_spectrum(&m, &[(1, 1), (1, 1)], 3).unwrap();
        assert_eq!(dynkin, vec![2]);
        assert!(!ok);
        let m3 = module(3, 2);
        let (_, dynkin, ok) = weight_spectrum(&m3, &[(1, 1)], 4).unwrap();
        assert_eq!(dynkin, vec![1, 0]);
        assert!(ok);
    }
}
