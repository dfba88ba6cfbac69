//! Python bindings: `import pytilequbo`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tilequbo::experiment::experiment_seeds;
use tilequbo::format::{export_qubo, ising_to_json, parse_any, qubo_to_json, Model};

fn err(e: tilequbo::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A board plus the pieces to place on it.
#[pyclass(name = "PuzzleInstance", module = "pytilequbo", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyInstance(tilequbo::PuzzleInstance);

#[pymethods]
impl PyInstance {
    /// `PuzzleInstance(width, height, "I=2,O=2")` with built-in tetrominoes.
    #[new]
    fn new(width: usize, height: usize, pieces: &str) -> PyResult<Self> {
        let board = tilequbo::Board::new(width, height).map_err(err)?;
        tilequbo::PuzzleInstance::from_piece_list(board, pieces).map(Self).map_err(err)
    }

    /// The 5x8 board with two of each tetromino.
    #[staticmethod]
    fn standard() -> Self {
        Self(tilequbo::PuzzleInstance::standard())
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        tilequbo::PuzzleInstance::from_toml(text).map(Self).map_err(err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.board().width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.board().height()
    }

    /// Required count per shape label.
    fn counts(&self) -> BTreeMap<String, usize> {
        self.0.counts().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Placement count per shape label, in catalog order.
    fn placement_counts(&self) -> Vec<(String, usize)> {
        self.0
            .catalog()
            .shape_ranges()
            .iter()
            .map(|(id, r)| (id.to_string(), r.len()))
            .collect()
    }

    /// `(index, shape, cells)` for every placement.
    fn placements(&self) -> Vec<(usize, String, Vec<usize>)> {
        self.0
            .catalog()
            .placements()
            .iter()
            .map(|p| (p.index, p.shape.to_string(), p.cells.clone()))
            .collect()
    }

    /// Exact number of ways to choose the required placements per shape, as a decimal string.
    fn combination_count(&self) -> String {
        tilequbo::combination_count(&self.0.catalog(), &self.0.counts()).value.to_string()
    }

    fn area_mismatch(&self) -> Option<(usize, usize)> {
        self.0.area_mismatch()
    }

    fn description(&self) -> String {
        self.0.canonical_description()
    }

    fn instance_hash(&self) -> String {
        self.0.instance_hash()
    }

    /// Enumerates tilings exactly. Returns a dict with `count`, `complete`,
    /// `orbits` (None when incomplete) and `solutions` (placement index lists).
    #[pyo3(signature = (limit=None))]
    fn exact<'py>(&self, py: Python<'py>, limit: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
        let catalog = self.0.catalog();
        let found = tilequbo::enumerate_exact(&tilequbo::build_cover_problem(&catalog, &self.0.counts()), limit);
        let d = PyDict::new(py);
        d.set_item("count", found.solutions.len())?;
        d.set_item("complete", found.complete)?;
        let orbits = found
            .complete
            .then(|| tilequbo::symmetry_breakdown(&catalog, &found.solutions).orbits);
        d.set_item("orbits", orbits)?;
        let sols: Vec<Vec<usize>> = found.solutions.into_iter().map(|s| s.0).collect();
        d.set_item("solutions", sols)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("PuzzleInstance({:?})", self.0.canonical_description())
    }
}

/// A quadratic model over binary variables.
#[pyclass(name = "Qubo", module = "pytilequbo", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyQubo(tilequbo::Qubo);

#[pymethods]
impl PyQubo {
    #[new]
    #[pyo3(signature = (linear, couplers, offset=0.0))]
    fn new(linear: Vec<f64>, couplers: BTreeMap<(usize, usize), f64>, offset: f64) -> PyResult<Self> {
        tilequbo::Qubo::from_parts(linear, couplers, offset).map(Self).map_err(err)
    }

    /// Parses `.qubo` text or QUBO/Ising JSON; Ising input is converted.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        match parse_any(text).map_err(err)?.0 {
            Model::Qubo(q) => Ok(Self(q)),
            Model::Ising(m) => Ok(Self(tilequbo::from_ising(&m))),
        }
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn offset(&self) -> f64 {
        self.0.offset()
    }

    #[getter]
    fn linear(&self) -> Vec<f64> {
        self.0.linear().to_vec()
    }

    #[getter]
    fn couplers(&self) -> BTreeMap<(usize, usize), f64> {
        self.0.quadratic().clone()
    }

    /// Energy of a 0/1 sequence.
    fn energy(&self, bits: Vec<u8>) -> PyResult<f64> {
        if bits.iter().any(|&b| b > 1) {
            return Err(PyValueError::new_err("bits must be 0 or 1"));
        }
        self.0.try_energy(&tilequbo::Assignment::from_bits(bits)).map_err(err)
    }

    /// `(h, J, offset)` with E = -sum J s s - sum h s + offset, s = 2q - 1.
    fn to_ising(&self) -> (Vec<f64>, BTreeMap<(usize, usize), f64>, f64) {
        let m = tilequbo::to_ising(&self.0);
        (m.fields().to_vec(), m.couplings().clone(), m.offset())
    }

    fn ising_energy(&self, spins: Vec<i8>) -> PyResult<f64> {
        if spins.len() != self.0.n() || spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(PyValueError::new_err("spins must be n values of +1 or -1"));
        }
        Ok(tilequbo::to_ising(&self.0).energy(&spins))
    }

    /// Serializes as `qubo` (text), `json` or `ising` (JSON).
    #[pyo3(signature = (format="qubo"))]
    fn export(&self, format: &str) -> PyResult<String> {
        match format {
            "qubo" => Ok(export_qubo(&self.0)),
            "json" => Ok(qubo_to_json(&self.0, None)),
            "ising" => Ok(ising_to_json(&tilequbo::to_ising(&self.0), None)),
            other => Err(PyValueError::new_err(format!("unknown format {other:?}"))),
        }
    }

    /// Brute-force minimum: `(energy, minimizers)`, n <= 25.
    fn brute_force(&self) -> PyResult<(f64, Vec<Vec<u32>>)> {
        let b = tilequbo::brute_force(&self.0).map_err(err)?;
        let argmins = b.argmins.into_iter().map(|a| a.bits().iter().map(|&v| u32::from(v)).collect());
        Ok((b.min_energy, argmins.collect()))
    }

    fn __repr__(&self) -> String {
        format!("Qubo(n={}, couplers={})", self.0.n(), self.0.quadratic().len())
    }
}

/// An instance with its penalty model, ready to solve.
#[pyclass(name = "TilingProblem", module = "pytilequbo", frozen)]
struct PyProblem(tilequbo::TilingProblem);

fn solver_configs(sub_size: usize, stall_rounds: Option<usize>, subsolver: &str) -> PyResult<(tilequbo::SolverConfig, tilequbo::DecomposeConfig)> {
    let defaults = tilequbo::DecomposeConfig::default();
    let d = tilequbo::DecomposeConfig {
        sub_size,
        stall_rounds: stall_rounds.unwrap_or(defaults.stall_rounds),
        subsolver: subsolver.parse().map_err(err)?,
        ..defaults
    };
    d.validate().map_err(err)?;
    Ok((tilequbo::SolverConfig::default(), d))
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (instance, a=1.0, b=1.0))]
    fn new(instance: &PyInstance, a: f64, b: f64) -> PyResult<Self> {
        let w = tilequbo::PenaltyWeights::new(a, b).map_err(err)?;
        Ok(Self(tilequbo::TilingProblem::new(instance.0.clone(), w)))
    }

    #[getter]
    fn qubo(&self) -> PyQubo {
        PyQubo(self.0.qubo.clone())
    }

    /// Solves once with `sa`, `tabu`, `decompose` or `exact`. Returns a dict
    /// with energy, validity, placements, subproblem_solves and the board.
    #[pyo3(signature = (method="decompose", seed=0, sub_size=50, stall_rounds=None, subsolver="tabu"))]
    fn solve<'py>(
        &self,
        py: Python<'py>,
        method: &str,
        seed: u64,
        sub_size: usize,
        stall_rounds: Option<usize>,
        subsolver: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let method: tilequbo::Method = method.parse().map_err(err)?;
        let (s, d) = solver_configs(sub_size, stall_rounds, subsolver)?;
        let r = self.0.solve(method, &s, &d, seed).map_err(err)?;
        self.describe(py, &r.best_assignment, Some(&r))
    }

    /// Validates a list of placement indices.
    fn validate<'py>(&self, py: Python<'py>, placements: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
        let x = self.assignment(&placements)?;
        self.describe(py, &x, None)
    }

    fn render(&self, placements: Vec<usize>) -> PyResult<String> {
        let x = self.assignment(&placements)?;
        Ok(tilequbo::render(&tilequbo::decode(&x, &self.0.catalog), self.0.instance.board()))
    }

    /// Seeded batch (seeds `seed .. seed + runs`). Returns summary statistics.
    #[pyo3(signature = (runs=100, method="decompose", seed=0, jobs=1, sub_size=50))]
    fn experiment<'py>(
        &self,
        py: Python<'py>,
        runs: usize,
        method: &str,
        seed: u64,
        jobs: usize,
        sub_size: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let method: tilequbo::Method = method.parse().map_err(err)?;
        let (s, d) = solver_configs(sub_size, None, "tabu")?;
        let seeds = experiment_seeds(seed, runs, false);
        let (stats, _) = tilequbo::run_experiment(&self.0, method, &s, &d, &seeds, jobs).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("runs", stats.runs)?;
        out.set_item("valid_count", stats.valid_count)?;
        out.set_item("invalid_count", stats.invalid_count)?;
        out.set_item("distinct_valid_solutions", stats.distinct_valid_solutions)?;
        out.set_item("mean_subproblem_solves", stats.mean_subproblem_solves)?;
        out.set_item("energy_histogram", stats.energy_histogram)?;
        out.set_item("defect_histogram", stats.defect_histogram)?;
        Ok(out)
    }
}

impl PyProblem {
    fn assignment(&self, placements: &[usize]) -> PyResult<tilequbo::Assignment> {
        let n = self.0.catalog.len();
        if let Some(&bad) = placements.iter().find(|&&i| i >= n) {
            return Err(PyValueError::new_err(format!("placement {bad} out of range (n = {n})")));
        }
        Ok(tilequbo::Assignment::from_ones(n, placements))
    }

    fn describe<'py>(
        &self,
        py: Python<'py>,
        x: &tilequbo::Assignment,
        run: Option<&tilequbo::SolveResult>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let report = self.0.report(x);
        let d = PyDict::new(py);
        d.set_item("energy", self.0.qubo.energy(x))?;
        d.set_item("valid", report.is_valid)?;
        d.set_item("placements", x.ones())?;
        let counts: BTreeMap<String, usize> = report.shape_counts.iter().map(|(k, &v)| (k.to_string(), v)).collect();
        d.set_item("shape_counts", counts)?;
        d.set_item("overlap_cells", report.overlap_cells.clone())?;
        d.set_item("gap_cells", report.gap_cells.clone())?;
        d.set_item("board", tilequbo::render(&tilequbo::decode(x, &self.0.catalog), self.0.instance.board()))?;
        if let Some(r) = run {
            d.set_item("subproblem_solves", r.subproblem_solves)?;
            d.set_item("iterations", r.iterations)?;
            d.set_item("seed", r.seed)?;
        }
        Ok(d)
    }
}

#[pymodule]
fn pytilequbo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyQubo>()?;
    m.add_class::<PyProblem>()?;
    Ok(())
}
