use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::mbqc::Pattern;
use crate::protocol::{ClientSecrets, Variant};

/// Every assignment of the client's secrets for one pattern, in mixed radix:
/// angles on all vertices, flips on measured vertices, pads on quantum inputs,
/// bits on dummies.
#[derive(Clone, Debug)]
pub struct SecretSpace {
    vertices: usize,
    measured: Vec<usize>,
    pads: Vec<usize>,
    dummies: Vec<usize>,
}

impl SecretSpace {
    pub fn new(pattern: &Pattern, variant: Variant, quantum_input: bool) -> Self {
        let pads = if quantum_input && variant != Variant::ClassicalInput {
            pattern.graph().inputs().to_vec()
        } else {
            Vec::new()
        };
        SecretSpace {
            vertices: pattern.vertex_count(),
            measured: pattern.order().to_vec(),
            pads,
            dummies: pattern.dummies().iter().copied().collect(),
        }
    }

    /// log2 of the number of assignments.
    pub fn bits(&self) -> usize {
        3 * self.vertices + self.measured.len() + self.pads.len() + self.dummies.len()
    }

    pub fn size(&self) -> Result<u64> {
        if self.bits() >= 63 {
            return Err(Error::CapExceeded {
                what: "secret assignments (log2)",
                limit: 62,
                requested: self.bits(),
            });
        }
        Ok(1 << self.bits())
    }

    pub fn cardinalities(&self) -> [(&'static str, u64); 4] {
        [
            ("theta", 1 << (3 * self.vertices)),
            ("flip", 1 << self.measured.len()),
            ("pad", 1 << self.pads.len()),
            ("dummy", 1 << self.dummies.len()),
        ]
    }

    /// The assignment with index `k`; angles vary slowest.
    pub fn nth(&self, mut k: u64) -> ClientSecrets {
        let mut s = ClientSecrets::zero(self.vertices);
        let mut bit = || {
            let b = k & 1 == 1;
            k >>= 1;
            b
        };
        for &v in &self.dummies {
            s.dummy_bits[v] = bit();
        }
        for &v in &self.pads {
            s.pad[v] = bit();
        }
        for &v in &self.measured {
            s.flip[v] = bit();
        }
        for v in 0..self.vertices {
            let t = (bit() as i64) | (bit() as i64) << 1 | (bit() as i64) << 2;
            s.theta[v] = AngleIndex::new(t);
        }
        s
    }

    pub fn iter(&self) -> Result<impl Iterator<Item = ClientSecrets> + '_> {
        let n = self.size()?;
        Ok((0..n).map(move |k| self.nth(k)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::line_pattern;
    use crate::mbqc::OutputMode;
    use std::collections::BTreeSet;

    #[test]
    fn enumerates_distinct_assignments() {
        let p = line_pattern(&[1], OutputMode::Quantum)
            .unwrap()
            .with_extra_dummies(&[1])
            .unwrap();
        let space = SecretSpace::new(&p, Variant::Dummy, true);
        assert_eq!(space.size().unwrap(), 8u64.pow(3) * 4 * 2 * 2);
        let all: BTreeSet<String> = space.iter().unwrap().map(|s| format!("{s:?}")).collect();
        assert_eq!(all.len() as u64, space.size().unwrap());
        for s in space.iter().unwrap().take(100) {
            s.validate(&p, true).unwrap();
        }
    }
}
