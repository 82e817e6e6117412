use serde::{Deserialize, Serialize};

use super::pattern::Pattern;
use crate::angle::AngleIndex;

/// Which earlier bits a vertex's measurement angle or output correction depends on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dependencies {
    /// Flow predecessor whose outcome flips the angle sign.
    pub x_source: Option<usize>,
    /// Outcomes that add pi to the angle.
    pub z_sources: Vec<usize>,
    /// Inputs whose one-time-pad bit adds pi to the angle.
    pub pad_sources: Vec<usize>,
    /// Bridges joined to this vertex; each adds +pi/2 or -pi/2 by its outcome.
    pub bridge_sources: Vec<usize>,
}

impl Dependencies {
    /// X-dependency bit from logical outcomes `s`.
    pub fn x_bit(&self, s: &[bool]) -> bool {
        self.x_source.is_some_and(|j| s[j])
    }

    /// Z-dependency bit from logical outcomes `s` and input pads `x`.
    pub fn z_bit(&self, s: &[bool], pads: &[bool]) -> bool {
        self.z_sources.iter().fold(false, |acc, &j| acc ^ s[j])
            ^ self.pad_sources.iter().fold(false, |acc, &k| acc ^ pads[k])
    }

    /// Accumulated bridge rotation.
    pub fn bridge_rotation(&self, s: &[bool]) -> AngleIndex {
        self.bridge_sources
            .iter()
            .fold(AngleIndex::ZERO, |acc, &b| {
                acc + if s[b] {
                    AngleIndex::new(6)
                } else {
                    AngleIndex::HALF_PI
                }
            })
    }
}

/// Dependencies for every vertex of the pattern, indexed by vertex.
pub fn dependencies(pattern: &Pattern) -> Vec<Dependencies> {
    let m = pattern.vertex_count();
    let comp = pattern.computation();
    let graph = pattern.graph();
    let mut deps = vec![Dependencies::default(); m];
    for (&j, &fj) in &pattern.flow().successor {
        deps[fj].x_source = Some(j);
        for &i in &comp.adjacency[fj] {
            if i != j {
                deps[i].z_sources.push(j);
            }
        }
    }
    let carries_data = |v: usize| comp.vertices.contains(&v) || pattern.bridges().contains(&v);
    for &k in graph.inputs() {
        for &v in graph.neighbors(k) {
            if carries_data(v) {
                deps[v].pad_sources.push(k);
            }
        }
    }
    for (&b, &(x, y)) in &comp.bridge_ends {
        deps[x].bridge_sources.push(b);
        deps[y].bridge_sources.push(b);
    }
    for d in &mut deps {
        d.z_sources.sort_unstable();
        d.pad_sources.sort_unstable();
    }
    deps
}

/// The angle the server is asked to measure at.
///
/// `phi` is the computation angle, `theta` and `r` the hiding rotation and
/// flip, `pad` the input X pad, `x_bit`/`z_bit` the flow dependencies and
/// `bridge` the accumulated bridge rotation.
pub fn adapted_angle(
    phi: AngleIndex,
    theta: AngleIndex,
    r: bool,
    pad: bool,
    x_bit: bool,
    z_bit: bool,
    bridge: AngleIndex,
) -> AngleIndex {
    theta
        + AngleIndex::pi_if(r)
        + AngleIndex::pi_if(z_bit)
        + (phi.signed(x_bit) + bridge).signed(pad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adapted_angle_examples() {
        let zero = AngleIndex::ZERO;
        for k in 0..8 {
            let phi = AngleIndex::new(k);
            assert_eq!(
                adapted_angle(phi, zero, false, false, false, false, zero),
                phi
            );
        }
        let got = adapted_angle(
            AngleIndex::new(1),
            AngleIndex::new(2),
            true,
            false,
            false,
            false,
            zero,
        );
        assert_eq!(got, AngleIndex::new(7));
        let phi = AngleIndex::new(3);
        assert_eq!(
            adapted_angle(phi, zero, false, true, true, false, zero),
            phi
        );
        assert_eq!(
            adapted_angle(phi, zero, false, false, true, true, zero),
            AngleIndex::new(1)
        );
    }
}
