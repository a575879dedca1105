//! Geometry of the CNOT switch circuit and its computational bases.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::{DisorderRealization, HamiltonianOperator, PotentialProfile};
use crate::error::{Error, Result};

/// Eigenvalue of `sigma_3` for one register qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub fn value(self) -> i8 {
        match self {
            Spin::Down => -1,
            Spin::Up => 1,
        }
    }

    pub fn from_value(v: i8) -> Option<Spin> {
        match v {
            -1 => Some(Spin::Down),
            1 => Some(Spin::Up),
            _ => None,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Down => Spin::Up,
            Spin::Up => Spin::Down,
        }
    }
}

/// Classical register state `|sigma_3(c), sigma_3(p)>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegisterLabel {
    pub control: Spin,
    pub target: Spin,
}

impl RegisterLabel {
    pub const fn new(control: Spin, target: Spin) -> Self {
        RegisterLabel { control, target }
    }

    /// Position in the basis `{|-1,-1>, |-1,+1>, |+1,-1>, |+1,+1>}`.
    pub fn index(self) -> usize {
        2 * (self.control == Spin::Up) as usize + (self.target == Spin::Up) as usize
    }

    pub fn from_index(i: usize) -> RegisterLabel {
        let spin = |bit: bool| if bit { Spin::Up } else { Spin::Down };
        RegisterLabel::new(spin(i & 2 != 0), spin(i & 1 != 0))
    }

    /// Output of the CNOT truth table.
    pub fn cnot(self) -> RegisterLabel {
        match self.control {
            Spin::Up => RegisterLabel::new(self.control, self.target.flipped()),
            Spin::Down => self,
        }
    }
}

impl fmt::Display for RegisterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{:+},{:+}>", self.control.value(), self.target.value())
    }
}

/// Which arm of the switch the cursor walks: `Up` applies `sigma_1(p)`,
/// `Down` applies nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Up,
    Down,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Up => "U",
            Branch::Down => "D",
        }
    }

    pub fn control(self) -> Spin {
        match self {
            Branch::Up => Spin::Up,
            Branch::Down => Spin::Down,
        }
    }

    pub fn for_control(control: Spin) -> Branch {
        match control {
            Spin::Up => Branch::Up,
            Spin::Down => Branch::Down,
        }
    }
}

/// A clock of `s` sites with the switch between `a` and `b = a + 5`: the
/// upper arm runs through `a+1, a+2`, the lower through `a+3, a+4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitLayout {
    pub s: usize,
    pub a: usize,
}

impl CircuitLayout {
    pub fn new(s: usize, a: usize) -> Result<Self> {
        if a == 0 || s < a + 6 {
            return Err(Error::Geometry { s, a });
        }
        Ok(CircuitLayout { s, a })
    }

    pub fn b(&self) -> usize {
        self.a + 5
    }

    /// Number of coordinates along either computational path.
    pub fn path_len(&self) -> usize {
        self.s - 2
    }

    /// Physical site of path coordinate `j` (both 1-based).
    pub fn site(&self, branch: Branch, j: usize) -> usize {
        let a = self.a;
        match branch {
            Branch::Up if j <= a + 2 => j,
            Branch::Down if j <= a => j,
            Branch::Down if j <= a + 2 => j + 2,
            _ => j + 2,
        }
    }

    /// Path coordinate of a physical site shared by both branches or owned
    /// by `branch`; `None` for the other arm's sites.
    pub fn path_coordinate(&self, branch: Branch, x: usize) -> Option<usize> {
        let a = self.a;
        match branch {
            _ if x <= a => Some(x),
            _ if x >= self.b() && x <= self.s => Some(x - 2),
            Branch::Up if x <= a + 2 => Some(x),
            Branch::Down if (a + 3..=a + 4).contains(&x) => Some(x - 2),
            _ => None,
        }
    }

    /// Path coordinate along whichever arm passes through `x`; sites on the
    /// switch arms map to the coordinate of their own arm.
    pub fn clock_coordinate(&self, x: usize) -> usize {
        if x <= self.a + 2 {
            x
        } else {
            x - 2
        }
    }

    /// `V_L'(x) = -g j(x)`: a drop of `g` per step along either path.
    pub fn tilt_potential(&self, g: f64) -> PotentialProfile {
        PotentialProfile {
            values: (1..=self.s)
                .map(|x| -g * self.clock_coordinate(x) as f64)
                .collect(),
        }
    }
}

/// Path-coordinate to physical-site maps for both arms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCoordinateMap {
    pub up: Vec<usize>,
    pub down: Vec<usize>,
}

impl PathCoordinateMap {
    pub fn new(layout: &CircuitLayout) -> Self {
        let sites = |branch| {
            (1..=layout.path_len())
                .map(|j| layout.site(branch, j))
                .collect()
        };
        PathCoordinateMap {
            up: sites(Branch::Up),
            down: sites(Branch::Down),
        }
    }

    pub fn sites(&self, branch: Branch) -> &[usize] {
        match branch {
            Branch::Up => &self.up,
            Branch::Down => &self.down,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeresEntry {
    pub path: usize,
    pub site: usize,
    pub label: RegisterLabel,
}

/// Ordered computational basis `|x_j> (x) |R_j>` of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PeresBasis {
    pub branch: Branch,
    pub layout: CircuitLayout,
    pub entries: Vec<PeresEntry>,
}

impl PeresBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn final_label(&self) -> RegisterLabel {
        self.entries
            .last()
            .expect("layout has at least 5 path sites")
            .label
    }

    /// `(site - 1) * 4 + label` in the full cursor (x) register space.
    pub fn embedded_index(entry: &PeresEntry) -> usize {
        (entry.site - 1) * 4 + entry.label.index()
    }
}

/// Builds the Peres basis visited from `|1> (x) |input>`.
pub fn peres_basis(
    layout: &CircuitLayout,
    branch: Branch,
    input: RegisterLabel,
) -> Result<PeresBasis> {
    if input.control != branch.control() {
        return Err(Error::BranchMismatch {
            branch: branch.name(),
            control: input.control.value(),
            required: branch.control().value(),
        });
    }
    let after = match branch {
        Branch::Up => RegisterLabel::new(input.control, input.target.flipped()),
        Branch::Down => input,
    };
    let entries = (1..=layout.path_len())
        .map(|j| PeresEntry {
            path: j,
            site: layout.site(branch, j),
            label: if branch == Branch::Up && j >= layout.a + 2 {
                after
            } else {
                input
            },
        })
        .collect();
    Ok(PeresBasis {
        branch,
        layout: *layout,
        entries,
    })
}

/// `H_C + V_R + V_L'` restricted to one computational subspace, in path
/// coordinates: hopping `-1/2`, diagonal `eps_{x(j)} - g j`.
pub fn reduced_chain_hamiltonian(
    layout: &CircuitLayout,
    branch: Branch,
    disorder: &DisorderRealization,
    g: f64,
) -> Result<HamiltonianOperator> {
    if disorder.len() != layout.s {
        return Err(Error::DimensionMismatch {
            expected: layout.s,
            found: disorder.len(),
        });
    }
    let diagonal = (1..=layout.path_len())
        .map(|j| disorder.at(layout.site(branch, j)) - g * j as f64)
        .collect();
    HamiltonianOperator::with_diagonal(diagonal)
}

/// Frobenius norm of `[O (x) 1, P]` where `P` projects onto the span of
/// `basis` in the `4 s`-dimensional cursor (x) register space and `O` acts
/// on the cursor alone.
pub fn commutator_with_projector(
    cursor_operator: &DMatrix<f64>,
    basis: &PeresBasis,
) -> Result<f64> {
    let s = basis.layout.s;
    if cursor_operator.nrows() != s || cursor_operator.ncols() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: cursor_operator.nrows(),
        });
    }
    let dim = 4 * s;
    let op = cursor_operator.kronecker(&DMatrix::<f64>::identity(4, 4));
    let mut projector = DMatrix::<f64>::zeros(dim, dim);
    for entry in &basis.entries {
        let i = PeresBasis::embedded_index(entry);
        projector[(i, i)] = 1.0;
    }
    Ok((&op * &projector - &projector * &op).norm())
}

/// Commutator of a diagonal cursor potential with the subspace projector.
pub fn check_subspace_conservation(
    potential: &PotentialProfile,
    basis: &PeresBasis,
) -> Result<f64> {
    let op = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&potential.values));
    commutator_with_projector(&op, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_free_chain, free_eigensystem, sample_disorder, ChainSpec};
    use proptest::prelude::*;

    const UP_DOWN: RegisterLabel = RegisterLabel::new(Spin::Up, Spin::Down);
    const DOWN_DOWN: RegisterLabel = RegisterLabel::new(Spin::Down, Spin::Down);

    #[test]
    fn layouts() {
        let l = CircuitLayout::new(22, 9).unwrap();
        assert_eq!((l.b(), l.path_len()), (14, 20));
        let l = CircuitLayout::new(8, 1).unwrap();
        assert_eq!((l.b(), l.path_len()), (6, 6));
        assert!(CircuitLayout::new(7, 1).is_ok());
        assert!(matches!(
            CircuitLayout::new(6, 1),
            Err(Error::Geometry { s: 6, a: 1 })
        ));
        assert!(CircuitLayout::new(10, 0).is_err());
    }

    #[test]
    fn register_indexing() {
        for i in 0..4 {
            assert_eq!(RegisterLabel::from_index(i).index(), i);
        }
        assert_eq!(DOWN_DOWN.index(), 0);
        assert_eq!(RegisterLabel::new(Spin::Up, Spin::Up).index(), 3);
        assert_eq!(UP_DOWN.to_string(), "|+1,-1>");
    }

    #[test]
    fn coordinate_maps() {
        let l = CircuitLayout::new(22, 9).unwrap();
        let maps = PathCoordinateMap::new(&l);
        assert_eq!(&maps.up[..12], &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 14]);
        assert_eq!(&maps.down[..12], &[1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 13, 14]);
        assert_eq!(*maps.up.last().unwrap(), 22);
        let shared: Vec<usize> = maps
            .up
            .iter()
            .copied()
            .filter(|x| maps.down.contains(x))
            .collect();
        let expected: Vec<usize> = (1..=9).chain(14..=22).collect();
        assert_eq!(shared, expected);
        for branch in [Branch::Up, Branch::Down] {
            for (j, &x) in maps.sites(branch).iter().enumerate() {
                assert_eq!(l.path_coordinate(branch, x), Some(j + 1));
            }
        }
        assert_eq!(l.path_coordinate(Branch::Up, 12), None);
        assert_eq!(l.path_coordinate(Branch::Down, 10), None);
    }

    #[test]
    fn peres_bases() {
        let l = CircuitLayout::new(22, 9).unwrap();
        let up = peres_basis(&l, Branch::Up, UP_DOWN).unwrap();
        assert_eq!(up.len(), 20);
        assert_eq!(up.final_label(), RegisterLabel::new(Spin::Up, Spin::Up));
        assert_eq!(up.entries[9].label, UP_DOWN); // j = a + 1
        assert_eq!(up.entries[10].label, RegisterLabel::new(Spin::Up, Spin::Up)); // j = a + 2
        let down = peres_basis(&l, Branch::Down, DOWN_DOWN).unwrap();
        assert_eq!(down.len(), 20);
        assert!(down.entries.iter().all(|e| e.label == DOWN_DOWN));
        for basis in [&up, &down] {
            assert!(basis.entries.windows(2).all(|w| w[1].site > w[0].site));
        }
        assert!(matches!(
            peres_basis(&l, Branch::Up, DOWN_DOWN),
            Err(Error::BranchMismatch { .. })
        ));
    }

    #[test]
    fn clean_reduced_chains_are_free() {
        let l = CircuitLayout::new(22, 9).unwrap();
        let zero = DisorderRealization::zeros(22);
        let free = free_eigensystem(20).unwrap();
        for branch in [Branch::Up, Branch::Down] {
            let h = reduced_chain_hamiltonian(&l, branch, &zero, 0.0).unwrap();
            assert_eq!(h, build_free_chain(20).unwrap());
            let eig = h.diagonalize().unwrap();
            assert!((eig.eigenvalues - &free.eigenvalues).amax() < 1e-10);
        }
    }

    #[test]
    fn disorder_splits_branch_spectra() {
        let l = CircuitLayout::new(22, 9).unwrap();
        let eps = sample_disorder(&ChainSpec::new(22, 0.5, 0.0, 5).unwrap());
        let up = reduced_chain_hamiltonian(&l, Branch::Up, &eps, 2.0).unwrap();
        let down = reduced_chain_hamiltonian(&l, Branch::Down, &eps, 2.0).unwrap();
        assert_ne!(
            up.diagonalize().unwrap().eigenvalues,
            down.diagonalize().unwrap().eigenvalues
        );
        for j in 0..19 {
            let x0 = l.site(Branch::Up, j + 1);
            let x1 = l.site(Branch::Up, j + 2);
            let step = up.diagonal[j + 1] - up.diagonal[j];
            assert!((step - (-2.0 + eps.at(x1) - eps.at(x0))).abs() < 1e-12);
        }
        assert!(
            reduced_chain_hamiltonian(&l, Branch::Up, &DisorderRealization::zeros(5), 0.0).is_err()
        );
    }

    #[test]
    fn tilt_matches_reduced_diagonal() {
        let l = CircuitLayout::new(15, 4).unwrap();
        let v = l.tilt_potential(2.0);
        for branch in [Branch::Up, Branch::Down] {
            let h = reduced_chain_hamiltonian(&l, branch, &DisorderRealization::zeros(15), 2.0)
                .unwrap();
            for j in 1..=l.path_len() {
                assert_eq!(h.diagonal[j - 1], v.values[l.site(branch, j) - 1]);
            }
        }
    }

    #[test]
    fn identity_potential_commutes_exactly() {
        let l = CircuitLayout::new(10, 2).unwrap();
        let basis = peres_basis(&l, Branch::Up, UP_DOWN).unwrap();
        let ones = PotentialProfile {
            values: vec![1.0; 10],
        };
        assert_eq!(check_subspace_conservation(&ones, &basis).unwrap(), 0.0);
    }

    #[test]
    fn non_diagonal_perturbation_breaks_conservation() {
        // Hand oracle: O = |a+1><a+2| + h.c. without sigma_1(p). With
        // P containing |a+1,+->, |a+2,++>, [O, P] has four unit entries:
        // |a+1,++><a+2,++|, |a+2,+-><a+1,+-| and their negatives
        // transposed, so ||[O, P]||_F = 2.
        let l = CircuitLayout::new(7, 1).unwrap();
        let basis = peres_basis(&l, Branch::Up, UP_DOWN).unwrap();
        let mut op = DMatrix::zeros(7, 7);
        op[(1, 2)] = 1.0;
        op[(2, 1)] = 1.0;
        let norm = commutator_with_projector(&op, &basis).unwrap();
        assert!((norm - 2.0).abs() < 1e-15, "{norm}");
    }

    proptest! {
        #[test]
        fn diagonal_potentials_conserve_subspaces(
            a in 1usize..10,
            extra in 0usize..8,
            g in 0.0f64..3.0,
            seed in any::<u64>(),
            target_up in any::<bool>(),
        ) {
            let l = CircuitLayout::new(a + 6 + extra, a).unwrap();
            let target = if target_up { Spin::Up } else { Spin::Down };
            let eps = sample_disorder(&ChainSpec::new(l.s, 0.5, g, seed).unwrap());
            let total = crate::chain::assemble_hamiltonian(
                &HamiltonianOperator::with_diagonal(vec![0.0; l.s]).unwrap(),
                &[eps.to_potential(), l.tilt_potential(g)],
            ).unwrap();
            let v = PotentialProfile { values: total.diagonal };
            for branch in [Branch::Up, Branch::Down] {
                let basis = peres_basis(&l, branch, RegisterLabel::new(branch.control(), target)).unwrap();
                prop_assert!(check_subspace_conservation(&v, &basis).unwrap() <= 1e-12);
            }
        }
    }
}
