//! CSV snapshots of a [`StepState`].
//!
//! A snapshot with base path `out/step_000100` is three files:
//! `out/step_000100_cells.csv` (`i,j,x,y,phi,mu,sigma,z`, one row per cell),
//! `out/step_000100_nodes.csv` (`i,j,x,y,u1,u2,v1,v2`, one row per vertex)
//! and `out/step_000100_meta.csv` (`key,value` rows for the grid, `k`, `t`
//! and `tau`). Rows run with `i` fastest. Values carry 17 significant
//! digits, so reading back reproduces them bit for bit. `u_prev` is not
//! stored; it is rebuilt as `u − τ·v`.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::grid::{Grid, ScalarField, VectorField};
use crate::stepper::StepState;

pub const CELL_HEADER: &str = "i,j,x,y,phi,mu,sigma,z";
pub const NODE_HEADER: &str = "i,j,x,y,u1,u2,v1,v2";
pub const META_HEADER: &str = "key,value";

/// Largest grid a snapshot may declare; guards allocation on hostile input.
const MAX_ENTRIES: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("schema: {0}")]
    Schema(String),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, SnapshotError> {
    Err(SnapshotError::Schema(msg.into()))
}

/// The three file paths of a snapshot base.
pub fn snapshot_paths(base: &Path) -> [PathBuf; 3] {
    let name = base
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let with = |suffix: &str| base.with_file_name(format!("{name}_{suffix}.csv"));
    [with("cells"), with("nodes"), with("meta")]
}

/// Rendered contents of the three files, in the order of [`snapshot_paths`].
pub fn render_snapshot(state: &StepState, tau: f64) -> [String; 3] {
    let grid = *state.grid();
    let mut cells = String::with_capacity(grid.n_cells() * 100);
    cells.push_str(CELL_HEADER);
    cells.push('\n');
    for (i, j) in grid.cells() {
        let c = grid.cell(i, j);
        let (x, y) = grid.cell_center(i, j);
        cells.push_str(&format!(
            "{i},{j},{x:.16e},{y:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            state.phi.values()[c],
            state.mu.values()[c],
            state.sigma.values()[c],
            state.z.values()[c],
        ));
    }
    let mut nodes = String::with_capacity(grid.n_nodes() * 100);
    nodes.push_str(NODE_HEADER);
    nodes.push('\n');
    for (i, j) in grid.nodes() {
        let n = grid.node(i, j);
        let (x, y) = grid.node_position(i, j);
        nodes.push_str(&format!(
            "{i},{j},{x:.16e},{y:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            state.u.u1[n], state.u.u2[n], state.v.u1[n], state.v.u2[n],
        ));
    }
    let meta = format!(
        "{META_HEADER}\nnx,{}\nny,{}\nlx,{:.16e}\nly,{:.16e}\nk,{}\nt,{:.16e}\ntau,{:.16e}\n",
        grid.nx(),
        grid.ny(),
        grid.lx(),
        grid.ly(),
        state.k,
        state.t,
        tau
    );
    [cells, nodes, meta]
}

fn parse_meta(meta: &str) -> Result<(Grid, usize, f64, f64), SnapshotError> {
    let mut lines = meta.lines();
    if lines.next() != Some(META_HEADER) {
        return schema("meta header");
    }
    let mut get = |key: &str| -> Result<String, SnapshotError> {
        match lines.next().and_then(|l| l.split_once(',')) {
            Some((k, v)) if k == key => Ok(v.to_string()),
            _ => schema(format!("meta row `{key}` missing or out of order")),
        }
    };
    let int = |v: String| v.parse::<usize>().or_else(|_| schema(format!("bad integer `{v}`")));
    let real = |v: String| {
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map_or_else(|| schema(format!("bad number `{v}`")), Ok)
    };
    let nx = int(get("nx")?)?;
    let ny = int(get("ny")?)?;
    let lx = real(get("lx")?)?;
    let ly = real(get("ly")?)?;
    let k = int(get("k")?)?;
    let t = real(get("t")?)?;
    let tau = real(get("tau")?)?;
    if lines.any(|l| !l.is_empty()) {
        return schema("trailing meta rows");
    }
    match nx
        .checked_add(1)
        .zip(ny.checked_add(1))
        .and_then(|(a, b)| a.checked_mul(b))
    {
        Some(n) if n <= MAX_ENTRIES => {}
        _ => return schema("grid too large"),
    }
    if !(tau > 0.0) {
        return schema("tau must be positive");
    }
    let grid = Grid::new(nx, ny, lx, ly).or_else(|e| schema(e.to_string()))?;
    Ok((grid, k, t, tau))
}

/// Parses rows `i,j,x,y,a,b,c,d` in `i`-fastest order over `(0..ni)×(0..nj)`
/// into four columns.
fn parse_table(
    text: &str,
    header: &str,
    ni: usize,
    nj: usize,
) -> Result<[Vec<f64>; 4], SnapshotError> {
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return schema(format!("expected header `{header}`"));
    }
    let n = ni * nj;
    let mut cols: [Vec<f64>; 4] = Default::default();
    for c in cols.iter_mut() {
        c.reserve(n);
    }
    let mut rows = 0;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        if rows == n {
            return schema(format!("more than {n} rows"));
        }
        let (i, j) = (rows % ni, rows / ni);
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return schema(format!("row {} has {} columns", rows + 1, fields.len()));
        }
        if fields[0].parse::<usize>().ok() != Some(i) || fields[1].parse::<usize>().ok() != Some(j) {
            return schema(format!("row {} is not ({i}, {j})", rows + 1));
        }
        for f in &fields[2..4] {
            if f.parse::<f64>().is_err() {
                return schema(format!("row {}: bad coordinate `{f}`", rows + 1));
            }
        }
        for (col, f) in cols.iter_mut().zip(&fields[4..]) {
            match f.parse::<f64>() {
                Ok(v) if v.is_finite() => col.push(v),
                _ => return schema(format!("row {}: bad value `{f}`", rows + 1)),
            }
        }
        rows += 1;
    }
    if rows != n {
        return schema(format!("expected {n} rows, found {rows}"));
    }
    Ok(cols)
}

/// Rebuilds a state and its step length from the three file contents.
pub fn parse_snapshot(cells: &str, nodes: &str, meta: &str) -> Result<(StepState, f64), SnapshotError> {
    let (grid, k, t, tau) = parse_meta(meta)?;
    let [phi, mu, sigma, z] = parse_table(cells, CELL_HEADER, grid.nx(), grid.ny())?;
    let [u1, u2, v1, v2] = parse_table(nodes, NODE_HEADER, grid.nx() + 1, grid.ny() + 1)?;
    let scalar = |v: Vec<f64>| ScalarField::from_values(grid, v).or_else(|e| schema(e.to_string()));
    let vector =
        |a: Vec<f64>, b: Vec<f64>| VectorField::from_components(grid, a, b).or_else(|e| schema(e.to_string()));
    let u = vector(u1, u2)?;
    let v = vector(v1, v2)?;
    if !u.satisfies_dirichlet() || !v.satisfies_dirichlet() {
        return schema("nonzero boundary displacement or velocity");
    }
    let mut state = StepState {
        phi: scalar(phi)?,
        mu: scalar(mu)?,
        sigma: scalar(sigma)?,
        z: scalar(z)?,
        u_prev: u.clone(),
        u,
        v,
        k,
        t,
    };
    state.rebase_velocity(tau);
    Ok((state, tau))
}

pub fn write_snapshot(state: &StepState, tau: f64, base: &Path) -> Result<(), SnapshotError> {
    for (path, text) in snapshot_paths(base).iter().zip(render_snapshot(state, tau)) {
        fs::write(path, text).map_err(|source| SnapshotError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

pub fn read_snapshot(base: &Path) -> Result<(StepState, f64), SnapshotError> {
    let read = |path: &PathBuf| {
        fs::read_to_string(path).map_err(|source| SnapshotError::Io {
            path: path.clone(),
            source,
        })
    };
    let [c, n, m] = snapshot_paths(base);
    parse_snapshot(&read(&c)?, &read(&n)?, &read(&m)?)
}
