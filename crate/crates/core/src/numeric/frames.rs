use super::{inner, kron, NumericError, NumericOPB, C64};

const LINE_BAND: f64 = 1e-6;
/// Largest projector distance accepted for the subspace identity.
pub const PROJECTOR_TOLERANCE: f64 = 1e-8;

/// An orthogonal frame `{V, V⊥}` of one party, by the basis indices whose
/// local vector spans `V` and `V⊥` respectively.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub plain: Vec<usize>,
    pub perp: Vec<usize>,
    /// Frobenius distance between the projectors onto the spans of the
    /// remaining-party factors over `plain` and over `perp`.
    pub projector_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub slot: usize,
    pub frames: Vec<Frame>,
    /// First index of every line that has no perpendicular partner.
    pub unpaired: Vec<usize>,
    /// Gram defect of the remaining-party factors over one side of every
    /// frame, which must form a basis of the remaining parties; `None` when
    /// the frames are broken or that side has the wrong size.
    pub complement_defect: Option<f64>,
    /// Rows violating `Σ_i μ ≥ D − 1`; only checked when every party is a qubit.
    pub row_bound_failures: Option<Vec<usize>>,
}

impl FrameReport {
    pub fn failures(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for &r in &self.unpaired {
            out.push(format!("line of vector {} has no perpendicular partner", r + 1));
        }
        for f in &self.frames {
            if f.plain.len() != f.perp.len() {
                out.push(format!(
                    "frame at vector {} has multiplicities {} and {}",
                    f.plain[0] + 1,
                    f.plain.len(),
                    f.perp.len()
                ));
            }
            if f.projector_distance > PROJECTOR_TOLERANCE {
                out.push(format!(
                    "frame at vector {}: subspaces differ by {:e}",
                    f.plain[0] + 1,
                    f.projector_distance
                ));
            }
        }
        match self.complement_defect {
            None => out.push("one side of the frames does not give a basis of the other parties".into()),
            Some(d) if d > tol => out.push(format!("remaining-party vectors have Gram defect {d:e}")),
            _ => {}
        }
        for &r in self.row_bound_failures.iter().flatten() {
            out.push(format!("row {} has multiplicity sum below D − 1", r + 1));
        }
        out
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.failures(tol).is_empty()
    }
}

/// Groups the local vectors of one party into lines; returns the line of
/// every basis index and the first index of each line.
fn lines(b: &NumericOPB, slot: usize) -> (Vec<usize>, Vec<usize>) {
    let mut reps: Vec<usize> = Vec::new();
    let mut line_of = Vec::with_capacity(b.len());
    for s in 0..b.len() {
        let found = reps
            .iter()
            .position(|&r| inner(b.local(r, slot), b.local(s, slot)).norm() >= 1.0 - LINE_BAND);
        line_of.push(found.unwrap_or_else(|| {
            reps.push(s);
            reps.len() - 1
        }));
    }
    (line_of, reps)
}

fn rest(b: &NumericOPB, s: usize, slot: usize) -> Vec<C64> {
    (0..b.parties())
        .filter(|&i| i != slot)
        .fold(vec![C64::new(1.0, 0.0)], |acc, i| kron(&acc, b.local(s, i)))
}

fn projector(vectors: &[Vec<C64>]) -> Vec<C64> {
    let d = vectors.first().map_or(0, Vec::len);
    let mut p = vec![C64::new(0.0, 0.0); d * d];
    for v in vectors {
        for i in 0..d {
            for j in 0..d {
                p[i * d + j] += v[i] * v[j].conj();
            }
        }
    }
    p
}

fn frobenius(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Checks the frame structure of a qubit party: its lines pair into
/// orthogonal frames of equal multiplicities, one side of the frames gives a
/// basis of the other parties, each frame's two sides span the same
/// subspace there, and (all-qubit bases) the row multiplicity bound holds.
pub fn verify_frame_structure(b: &NumericOPB, slot: usize) -> Result<FrameReport, NumericError> {
    if slot >= b.parties() {
        return Err(NumericError::Shape(format!("no party {}", slot + 1)));
    }
    if b.dims()[slot] != 2 {
        return Err(NumericError::NotQubitSlot(slot));
    }
    let (line_of, reps) = lines(b, slot);
    let mut partner: Vec<Option<usize>> = vec![None; reps.len()];
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            if partner[i].is_none()
                && partner[j].is_none()
                && inner(b.local(reps[i], slot), b.local(reps[j], slot)).norm() <= LINE_BAND
            {
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
        }
    }
    let unpaired: Vec<usize> = (0..reps.len())
        .filter(|&i| partner[i].is_none())
        .map(|i| reps[i])
        .collect();
    let members = |line: usize| -> Vec<usize> { (0..b.len()).filter(|&s| line_of[s] == line).collect() };
    let rests: Vec<Vec<C64>> = (0..b.len()).map(|s| rest(b, s, slot)).collect();
    let mut frames = Vec::new();
    let mut side = Vec::new();
    for (i, &p) in partner.iter().enumerate() {
        let Some(j) = p else { continue };
        if j < i {
            continue;
        }
        let (plain, perp) = (members(i), members(j));
        let pick = |rows: &[usize]| -> Vec<Vec<C64>> { rows.iter().map(|&s| rests[s].clone()).collect() };
        let projector_distance = frobenius(&projector(&pick(&plain)), &projector(&pick(&perp)));
        side.extend(plain.iter().copied());
        frames.push(Frame {
            plain,
            perp,
            projector_distance,
        });
    }
    let complement_defect = (unpaired.is_empty() && 2 * side.len() == b.len()).then(|| {
        let mut worst: f64 = 0.0;
        for (x, &s) in side.iter().enumerate() {
            for &t in &side[x..] {
                let target = if s == t { 1.0 } else { 0.0 };
                worst = worst.max((inner(&rests[s], &rests[t]) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    });
    let row_bound_failures = b.all_qubits().then(|| {
        let lines_per_party: Vec<Vec<usize>> = (0..b.parties()).map(|i| lines(b, i).0).collect();
        (0..b.len())
            .filter(|&s| {
                let total: usize = lines_per_party
                    .iter()
                    .map(|l| l.iter().filter(|&&x| x == l[s]).count())
                    .sum();
                total + 1 < b.len()
            })
            .collect()
    });
    Ok(FrameReport {
        slot,
        frames,
        unpaired,
        complement_defect,
        row_bound_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::computational_basis;

    #[test]
    fn computational_frames() {
        let b = computational_basis(&[2, 2, 2]);
        for slot in 0..3 {
            let r = verify_frame_structure(&b, slot).unwrap();
            assert_eq!(r.frames.len(), 1);
            assert_eq!((r.frames[0].plain.len(), r.frames[0].perp.len()), (4, 4));
            assert!(r.passed(1e-9), "{:?}", r.failures(1e-9));
        }
    }

    #[test]
    fn qubit_qutrit_basis() {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let e = |k: usize| {
            let mut v = vec![z; 3];
            v[k] = one;
            v
        };
        let q = |k: usize| if k == 0 { vec![one, z] } else { vec![z, one] };
        let x = vec![z, h, h];
        let y = vec![z, h, -h];
        let vectors = vec![
            vec![q(0), e(0)],
            vec![q(0), e(1)],
            vec![q(0), e(2)],
            vec![q(1), e(0)],
            vec![q(1), x],
            vec![q(1), y],
        ];
        let b = NumericOPB::new(vec![2, 3], vectors, 1e-12).unwrap();
        let r = verify_frame_structure(&b, 0).unwrap();
        assert!(r.passed(1e-9), "{:?}", r.failures(1e-9));
        assert_eq!(r.row_bound_failures, None);
        assert_eq!(verify_frame_structure(&b, 1), Err(NumericError::NotQubitSlot(1)));
    }
}
