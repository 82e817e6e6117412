use num_complex::Complex64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::ops::{unitarity_deviation, LocalOp, Pauli};
use crate::angle::AngleIndex;
use crate::error::{Error, Result};

pub type QubitId = usize;

const NORM_TOLERANCE: f64 = 1e-10;
const CUSTOM_NORM_TOLERANCE: f64 = 1e-12;
/// Below this a forced outcome is treated as impossible.
pub const NULL_BRANCH_PROBABILITY: f64 = 1e-24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Owner {
    Alice,
    Bob,
}

/// How a fresh qubit is prepared.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PrepSpec {
    /// (|0> + e^{i k pi/4}|1>)/sqrt2
    PlusTheta(AngleIndex),
    Computational(bool),
    Custom([Complex64; 2]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Outcome 0 projects on |+_delta>, outcome 1 on |-_delta>.
    XY(AngleIndex),
    PauliZ,
}

pub enum MeasureMode<'a> {
    Random(&'a mut dyn RngCore),
    Forced(bool),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub outcome: bool,
    pub probability: f64,
    /// Set when a forced outcome had (numerically) zero probability.
    pub null_branch: bool,
}

#[derive(Clone, Debug)]
struct Register {
    /// qubits[k] is bit k of the amplitude index.
    qubits: Vec<QubitId>,
    amps: Vec<Complex64>,
}

#[derive(Clone, Debug)]
struct Slot {
    register: Option<usize>,
    owner: Owner,
    /// Known computational value of a qubit prepared in |0> or |1>.
    basis_tag: Option<bool>,
}

/// The joint pure state of every qubit in a session, kept as a product of registers.
#[derive(Clone, Debug)]
pub struct EnvironmentState {
    registers: Vec<Option<Register>>,
    free: Vec<usize>,
    slots: Vec<Slot>,
    factoring: bool,
    null_branch: bool,
    branch_probability: f64,
}

impl Default for EnvironmentState {
    fn default() -> Self {
        Self::new()
    }
}

fn insert_bit(j: usize, k: usize, bit: usize) -> usize {
    let low = j & ((1 << k) - 1);
    let high = (j >> k) << (k + 1);
    high | (bit << k) | low
}

impl EnvironmentState {
    pub fn new() -> Self {
        EnvironmentState {
            registers: Vec::new(),
            free: Vec::new(),
            slots: Vec::new(),
            factoring: true,
            null_branch: false,
            branch_probability: 1.0,
        }
    }

    /// Turns the computational-basis CZ shortcut on or off.
    pub fn with_factoring(mut self, on: bool) -> Self {
        self.factoring = on;
        self
    }

    pub fn factoring(&self) -> bool {
        self.factoring
    }

    /// True once a forced measurement hit a zero-probability outcome.
    pub fn null_branch(&self) -> bool {
        self.null_branch
    }

    /// Product of the probabilities of all measurements so far.
    pub fn branch_probability(&self) -> f64 {
        self.branch_probability
    }

    fn push_register(&mut self, reg: Register) -> usize {
        if let Some(idx) = self.free.pop() {
            self.registers[idx] = Some(reg);
            idx
        } else {
            self.registers.push(Some(reg));
            self.registers.len() - 1
        }
    }

    fn reg(&self, idx: usize) -> &Register {
        self.registers[idx]
            .as_ref()
            .expect("slot points at a live register")
    }

    fn reg_mut(&mut self, idx: usize) -> &mut Register {
        self.registers[idx]
            .as_mut()
            .expect("slot points at a live register")
    }

    fn register_of(&self, q: QubitId) -> Result<usize> {
        self.slots
            .get(q)
            .and_then(|s| s.register)
            .ok_or(Error::DeadQubit(q))
    }

    fn position(&self, q: QubitId) -> Result<(usize, usize)> {
        let r = self.register_of(q)?;
        let k = self
            .reg(r)
            .qubits
            .iter()
            .position(|&x| x == q)
            .expect("qubit listed in its register");
        Ok((r, k))
    }

    /// One single-qubit register per preparation, all owned by Alice.
    pub fn allocate(&mut self, preps: &[PrepSpec]) -> Result<Vec<QubitId>> {
        let mut ids = Vec::with_capacity(preps.len());
        for prep in preps {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let (amps, tag) = match *prep {
                PrepSpec::PlusTheta(k) => (vec![Complex64::new(h, 0.0), k.phase() * h], None),
                PrepSpec::Computational(b) => {
                    let one = Complex64::new(1.0, 0.0);
                    (if b { vec![ZERO, one] } else { vec![one, ZERO] }, Some(b))
                }
                PrepSpec::Custom(a) => {
                    let norm = a[0].norm_sqr() + a[1].norm_sqr();
                    if (norm - 1.0).abs() > CUSTOM_NORM_TOLERANCE {
                        return Err(Error::NotNormalized(norm.sqrt()));
                    }
                    (a.to_vec(), None)
                }
            };
            let q = self.slots.len();
            let r = self.push_register(Register {
                qubits: vec![q],
                amps,
            });
            self.slots.push(Slot {
                register: Some(r),
                owner: Owner::Alice,
                basis_tag: tag,
            });
            ids.push(q);
        }
        Ok(ids)
    }

    /// A multi-qubit register with the given little-endian amplitudes, owned by Alice.
    pub fn allocate_register(&mut self, amps: Vec<Complex64>) -> Result<Vec<QubitId>> {
        if !amps.len().is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm.sqrt()));
        }
        let n = amps.len().trailing_zeros() as usize;
        let first = self.slots.len();
        let qubits: Vec<QubitId> = (first..first + n).collect();
        if n == 0 {
            return Ok(qubits);
        }
        let r = self.push_register(Register {
            qubits: qubits.clone(),
            amps,
        });
        for _ in 0..n {
            self.slots.push(Slot {
                register: Some(r),
                owner: Owner::Alice,
                basis_tag: None,
            });
        }
        Ok(qubits)
    }

    pub fn is_live(&self, q: QubitId) -> bool {
        self.slots.get(q).is_some_and(|s| s.register.is_some())
    }

    pub fn owner(&self, q: QubitId) -> Result<Owner> {
        self.register_of(q)?;
        Ok(self.slots[q].owner)
    }

    pub fn set_owner(&mut self, q: QubitId, owner: Owner) -> Result<()> {
        self.register_of(q)?;
        self.slots[q].owner = owner;
        Ok(())
    }

    pub fn live_qubits(&self) -> Vec<QubitId> {
        (0..self.slots.len()).filter(|&q| self.is_live(q)).collect()
    }

    pub fn qubits_owned_by(&self, owner: Owner) -> Vec<QubitId> {
        (0..self.slots.len())
            .filter(|&q| self.is_live(q) && self.slots[q].owner == owner)
            .collect()
    }

    /// Number of qubits sharing a register with `q`.
    pub fn register_size(&self, q: QubitId) -> Result<usize> {
        Ok(self.reg(self.register_of(q)?).qubits.len())
    }

    pub fn register_count(&self) -> usize {
        self.registers.iter().filter(|r| r.is_some()).count()
    }

    /// Whether `q` is tagged as an exact computational basis state.
    pub fn basis_tag(&self, q: QubitId) -> Result<Option<bool>> {
        self.register_of(q)?;
        Ok(self.slots[q].basis_tag)
    }

    fn merge(&mut self, ra: usize, rb: usize) -> usize {
        if ra == rb {
            return ra;
        }
        let b = self.registers[rb].take().expect("live register");
        self.free.push(rb);
        let a = self.reg_mut(ra);
        let na = a.qubits.len();
        let mut amps = vec![ZERO; a.amps.len() * b.amps.len()];
        for (ib, &vb) in b.amps.iter().enumerate() {
            if vb == ZERO {
                continue;
            }
            for (ia, &va) in a.amps.iter().enumerate() {
                amps[ia | (ib << na)] = va * vb;
            }
        }
        a.amps = amps;
        a.qubits.extend_from_slice(&b.qubits);
        let moved = b.qubits;
        for q in moved {
            self.slots[q].register = Some(ra);
        }
        let members = self.reg(ra).qubits.clone();
        for q in members {
            self.slots[q].basis_tag = None;
        }
        ra
    }

    pub fn apply_cz(&mut self, a: QubitId, b: QubitId) -> Result<()> {
        if a == b {
            return Err(Error::InvalidGraph(format!(
                "CZ needs two distinct qubits, got {a} twice"
            )));
        }
        let ra = self.register_of(a)?;
        let rb = self.register_of(b)?;
        if self.factoring {
            if let Some(bit) = self.slots[a].basis_tag {
                if bit {
                    self.apply_local(b, &LocalOp::Z)?;
                }
                return Ok(());
            }
            if let Some(bit) = self.slots[b].basis_tag {
                if bit {
                    self.apply_local(a, &LocalOp::Z)?;
                }
                return Ok(());
            }
        }
        let r = self.merge(ra, rb);
        let reg = self.reg_mut(r);
        let ka = reg.qubits.iter().position(|&x| x == a).expect("merged");
        let kb = reg.qubits.iter().position(|&x| x == b).expect("merged");
        let mask = (1 << ka) | (1 << kb);
        for (i, amp) in reg.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_local(&mut self, q: QubitId, op: &LocalOp) -> Result<()> {
        let m = op.matrix();
        if let LocalOp::Unitary(_) = op {
            let dev = unitarity_deviation(&m);
            if dev > NORM_TOLERANCE {
                return Err(Error::NonUnitary(dev));
            }
        }
        let (r, k) = self.position(q)?;
        let reg = self.reg_mut(r);
        let half = reg.amps.len() / 2;
        for j in 0..half {
            let i0 = insert_bit(j, k, 0);
            let i1 = i0 | (1 << k);
            let (a0, a1) = (reg.amps[i0], reg.amps[i1]);
            reg.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            reg.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        let diagonal = m[0][1] == ZERO && m[1][0] == ZERO;
        let anti = m[0][0] == ZERO && m[1][1] == ZERO;
        let slot = &mut self.slots[q];
        slot.basis_tag = match slot.basis_tag {
            Some(b) if diagonal => Some(b),
            Some(b) if anti => Some(!b),
            _ => None,
        };
        Ok(())
    }

    pub fn apply_pauli(&mut self, q: QubitId, p: Pauli) -> Result<()> {
        if p == Pauli::I {
            self.register_of(q)?;
            return Ok(());
        }
        self.apply_local(q, &LocalOp::Pauli(p))
    }

    /// Applies a unitary on several qubits; `matrix` is row-major over the
    /// little-endian index of `qubits`.
    pub fn apply_unitary(&mut self, qubits: &[QubitId], matrix: &[Complex64]) -> Result<()> {
        let n = qubits.len();
        let dim = 1usize << n;
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {n}-qubit unitary",
                matrix.len()
            )));
        }
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = ZERO;
                for k in 0..dim {
                    acc += matrix[k * dim + r].conj() * matrix[k * dim + c];
                }
                if r == c {
                    acc -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(acc.norm());
            }
        }
        if worst > NORM_TOLERANCE {
            return Err(Error::NonUnitary(worst));
        }
        if n == 0 {
            return Ok(());
        }
        let mut r = self.register_of(qubits[0])?;
        for &q in &qubits[1..] {
            let rq = self.register_of(q)?;
            r = self.merge(r, rq);
        }
        let reg = self.reg_mut(r);
        let pos: Vec<usize> = qubits
            .iter()
            .map(|q| reg.qubits.iter().position(|x| x == q).expect("merged"))
            .collect();
        let mask: usize = pos.iter().map(|k| 1 << k).sum();
        let mut scratch = vec![ZERO; dim];
        for base in 0..reg.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let index = |local: usize| {
                pos.iter()
                    .enumerate()
                    .fold(base, |acc, (b, &k)| acc | (((local >> b) & 1) << k))
            };
            for (row, out) in scratch.iter_mut().enumerate() {
                *out = (0..dim)
                    .map(|c| matrix[row * dim + c] * reg.amps[index(c)])
                    .sum();
            }
            for (row, &v) in scratch.iter().enumerate() {
                reg.amps[index(row)] = v;
            }
        }
        for &q in qubits {
            self.slots[q].basis_tag = None;
        }
        Ok(())
    }

    /// Measures and removes `q`, collapsing its register.
    pub fn measure(
        &mut self,
        q: QubitId,
        basis: Basis,
        mode: MeasureMode<'_>,
    ) -> Result<Measurement> {
        let (r, k) = self.position(q)?;
        let reg = self.reg(r);
        let half = reg.amps.len() / 2;
        let project = |a0: Complex64, a1: Complex64, outcome: bool| -> Complex64 {
            match basis {
                Basis::PauliZ => {
                    if outcome {
                        a1
                    } else {
                        a0
                    }
                }
                Basis::XY(delta) => {
                    let c = delta.phase().conj() * a1;
                    let h = std::f64::consts::FRAC_1_SQRT_2;
                    if outcome {
                        (a0 - c) * h
                    } else {
                        (a0 + c) * h
                    }
                }
            }
        };
        let collapsed = |outcome: bool| -> (Vec<Complex64>, f64) {
            let mut out = Vec::with_capacity(half);
            let mut p = 0.0;
            for j in 0..half {
                let i0 = insert_bit(j, k, 0);
                let v = project(reg.amps[i0], reg.amps[i0 | (1 << k)], outcome);
                p += v.norm_sqr();
                out.push(v);
            }
            (out, p)
        };
        let (outcome, (mut amps, p)) = match mode {
            MeasureMode::Forced(b) => (b, collapsed(b)),
            MeasureMode::Random(rng) => {
                let zero = collapsed(false);
                let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                if u < zero.1 {
                    (false, zero)
                } else {
                    (true, collapsed(true))
                }
            }
        };
        let null = p < NULL_BRANCH_PROBABILITY;
        if null {
            self.null_branch = true;
        } else {
            let scale = 1.0 / p.sqrt();
            for a in &mut amps {
                *a *= scale;
            }
        }
        self.branch_probability *= p;
        let reg = self.reg_mut(r);
        reg.qubits.remove(k);
        if reg.qubits.is_empty() {
            self.registers[r] = None;
            self.free.push(r);
        } else {
            reg.amps = amps;
        }
        self.slots[q].register = None;
        self.slots[q].basis_tag = None;
        Ok(Measurement {
            outcome,
            probability: p,
            null_branch: null,
        })
    }

    /// Registers touched by `qubits`, in first-touch order.
    fn touched(&self, qubits: &[QubitId]) -> Result<Vec<usize>> {
        let mut regs = Vec::new();
        for &q in qubits {
            let r = self.register_of(q)?;
            if !regs.contains(&r) {
                regs.push(r);
            }
        }
        Ok(regs)
    }

    /// Product state of the given registers with qubits laid out as `order`.
    fn joint_vector(&self, regs: &[usize], order: &[QubitId]) -> Vec<Complex64> {
        let mut layout: Vec<QubitId> = Vec::new();
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for &r in regs {
            let reg = self.reg(r);
            let shift = layout.len();
            let mut next = vec![ZERO; amps.len() * reg.amps.len()];
            for (ib, &vb) in reg.amps.iter().enumerate() {
                for (ia, &va) in amps.iter().enumerate() {
                    next[ia | (ib << shift)] = va * vb;
                }
            }
            amps = next;
            layout.extend_from_slice(&reg.qubits);
        }
        let target: Vec<usize> = layout
            .iter()
            .map(|q| {
                order
                    .iter()
                    .position(|x| x == q)
                    .expect("order covers the registers")
            })
            .collect();
        let mut out = vec![ZERO; amps.len()];
        for (i, &v) in amps.iter().enumerate() {
            let mut j = 0;
            for (bit, &t) in target.iter().enumerate() {
                j |= ((i >> bit) & 1) << t;
            }
            out[j] = v;
        }
        out
    }

    /// Pure state of `qubits` (little-endian in the given order). The set
    /// must be a union of whole registers.
    pub fn state_vector(&self, qubits: &[QubitId]) -> Result<Vec<Complex64>> {
        let regs = self.touched(qubits)?;
        let covered: usize = regs.iter().map(|&r| self.reg(r).qubits.len()).sum();
        if covered != qubits.len() {
            return Err(Error::DimensionMismatch(
                "requested qubits share registers with other qubits".into(),
            ));
        }
        Ok(self.joint_vector(&regs, qubits))
    }

    /// Reduced density operator of `qubits` (little-endian in the given order).
    pub fn reduced_density(&self, qubits: &[QubitId]) -> Result<DensityMatrix> {
        let regs = self.touched(qubits)?;
        let mut order = qubits.to_vec();
        for &r in &regs {
            for &q in &self.reg(r).qubits {
                if !order.contains(&q) {
                    order.push(q);
                }
            }
        }
        let psi = self.joint_vector(&regs, &order);
        let dim = 1usize << qubits.len();
        let mut rho = DensityMatrix::zeros(qubits.len());
        for chunk in psi.chunks(dim) {
            rho.accumulate_pure(chunk, 1.0);
        }
        Ok(rho)
    }

    /// Debug dump of every register with its little-endian qubit list.
    pub fn amplitude_dump(&self) -> serde_json::Value {
        let regs: Vec<serde_json::Value> = self
            .registers
            .iter()
            .flatten()
            .map(|reg| {
                serde_json::json!({
                    "qubits": reg.qubits,
                    "amplitudes": reg.amps.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({ "ordering": "little_endian", "registers": regs })
    }

    /// Deviation of each live register's norm from 1.
    pub fn worst_norm_error(&self) -> f64 {
        self.registers
            .iter()
            .flatten()
            .map(|reg| (reg.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::density::{fidelity, trace_distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn allocate_examples() {
        let mut env = EnvironmentState::new();
        let q = env
            .allocate(&[
                PrepSpec::PlusTheta(AngleIndex::ZERO),
                PrepSpec::Computational(true),
                PrepSpec::PlusTheta(AngleIndex::PI),
            ])
            .unwrap();
        assert_eq!(
            env.state_vector(&[q[0]]).unwrap(),
            vec![c(H, 0.0), c(H, 0.0)]
        );
        assert_eq!(
            env.state_vector(&[q[1]]).unwrap(),
            vec![c(0.0, 0.0), c(1.0, 0.0)]
        );
        assert_eq!(
            env.state_vector(&[q[2]]).unwrap(),
            vec![c(H, 0.0), c(-H, 0.0)]
        );
        let bad = env.allocate(&[PrepSpec::Custom([c(1.0, 0.0), c(1.0, 0.0)])]);
        assert!(matches!(bad, Err(Error::NotNormalized(_))));
    }

    #[test]
    fn cz_with_tagged_qubit_does_not_merge() {
        let mut env = EnvironmentState::new();
        let theta = AngleIndex::new(3);
        let q = env
            .allocate(&[PrepSpec::Computational(true), PrepSpec::PlusTheta(theta)])
            .unwrap();
        env.apply_cz(q[0], q[1]).unwrap();
        assert_eq!(env.register_count(), 2);
        let got = env.state_vector(&[q[1]]).unwrap();
        let want = [c(H, 0.0), (theta + AngleIndex::PI).phase() * H];
        assert!(fidelity(&got, &want) > 1.0 - 1e-15);

        let mut env = EnvironmentState::new();
        let q = env
            .allocate(&[PrepSpec::Computational(false), PrepSpec::PlusTheta(theta)])
            .unwrap();
        env.apply_cz(q[0], q[1]).unwrap();
        assert_eq!(env.register_count(), 2);
        assert!(
            fidelity(
                &env.state_vector(&[q[1]]).unwrap(),
                &[c(H, 0.0), theta.phase() * H]
            ) > 1.0 - 1e-15
        );
    }

    #[test]
    fn cz_on_plus_states_merges() {
        let mut env = EnvironmentState::new();
        let q = env
            .allocate(&[PrepSpec::PlusTheta(AngleIndex::ZERO); 2])
            .unwrap();
        env.apply_cz(q[0], q[1]).unwrap();
        assert_eq!(env.register_count(), 1);
        let psi = env.state_vector(&q).unwrap();
        let want = [c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)];
        assert!(fidelity(&psi, &want) > 1.0 - 1e-15);
        let rho = env.reduced_density(&[q[0]]).unwrap();
        assert!(trace_distance(&rho, &DensityMatrix::maximally_mixed(1)) < 1e-12);
    }

    #[test]
    fn local_gates() {
        let mut env = EnvironmentState::new();
        let q = env
            .allocate(&[
                PrepSpec::PlusTheta(AngleIndex::ZERO),
                PrepSpec::Computational(false),
            ])
            .unwrap();
        env.apply_local(q[0], &LocalOp::Phase(AngleIndex::HALF_PI))
            .unwrap();
        assert!(
            fidelity(&env.state_vector(&[q[0]]).unwrap(), &[c(H, 0.0), c(0.0, H)]) > 1.0 - 1e-15
        );
        env.apply_local(q[1], &LocalOp::X).unwrap();
        assert_eq!(
            env.state_vector(&[q[1]]).unwrap(),
            vec![c(0.0, 0.0), c(1.0, 0.0)]
        );
        assert_eq!(env.basis_tag(q[1]).unwrap(), Some(true));
        for k in 0..8 {
            let before = env.state_vector(&[q[0]]).unwrap();
            env.apply_local(q[0], &LocalOp::Phase(AngleIndex::new(k)))
                .unwrap();
            env.apply_local(q[0], &LocalOp::Phase(AngleIndex::new(8 - k)))
                .unwrap();
            let after = env.state_vector(&[q[0]]).unwrap();
            assert!(fidelity(&after, &before) > 1.0 - 1e-15);
        }
        env.apply_local(q[1], &LocalOp::H).unwrap();
        assert_eq!(env.basis_tag(q[1]).unwrap(), None);
    }

    #[test]
    fn measurement_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 0..8 {
            let theta = AngleIndex::new(k);
            let mut env = EnvironmentState::new();
            let q = env.allocate(&[PrepSpec::PlusTheta(theta); 2]).unwrap();
            let m = env
                .measure(q[0], Basis::XY(theta), MeasureMode::Random(&mut rng))
                .unwrap();
            assert!(!m.outcome);
            assert!((m.probability - 1.0).abs() < 1e-12);
            let m = env
                .measure(
                    q[1],
                    Basis::XY(theta + AngleIndex::PI),
                    MeasureMode::Random(&mut rng),
                )
                .unwrap();
            assert!(m.outcome);
            assert!(!env.is_live(q[1]));
        }
        let mut env = EnvironmentState::new();
        let q = env
            .allocate(&[PrepSpec::PlusTheta(AngleIndex::ZERO)])
            .unwrap();
        let m = env
            .clone()
            .measure(q[0], Basis::PauliZ, MeasureMode::Forced(true))
            .unwrap();
        assert!((m.probability - 0.5).abs() < 1e-15);
        let m = env
            .measure(q[0], Basis::XY(AngleIndex::ZERO), MeasureMode::Forced(true))
            .unwrap();
        assert!(m.null_branch);
        assert_eq!(m.probability, 0.0);
        assert!(env.null_branch());
    }

    #[test]
    fn dead_qubit_is_an_error() {
        let mut env = EnvironmentState::new();
        let q = env.allocate(&[PrepSpec::Computational(false); 2]).unwrap();
        env.measure(q[0], Basis::PauliZ, MeasureMode::Forced(false))
            .unwrap();
        assert_eq!(env.apply_cz(q[0], q[1]), Err(Error::DeadQubit(q[0])));
        assert_eq!(env.apply_local(99, &LocalOp::X), Err(Error::DeadQubit(99)));
    }

    #[test]
    fn multi_qubit_unitary_matches_cz() {
        let mut a = EnvironmentState::new();
        let qa = a
            .allocate(&[
                PrepSpec::PlusTheta(AngleIndex::new(1)),
                PrepSpec::PlusTheta(AngleIndex::new(5)),
            ])
            .unwrap();
        let mut b = a.clone();
        a.apply_cz(qa[0], qa[1]).unwrap();
        let one = c(1.0, 0.0);
        let z = c(0.0, 0.0);
        let cz = [one, z, z, z, z, one, z, z, z, z, one, z, z, z, z, -one];
        b.apply_unitary(&qa, &cz).unwrap();
        assert!(
            fidelity(&a.state_vector(&qa).unwrap(), &b.state_vector(&qa).unwrap()) > 1.0 - 1e-15
        );
    }
}
