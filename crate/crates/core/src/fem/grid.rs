use crate::config::MeshConfig;
use crate::error::{Error, Result};

/// Ordered nodes of a 1D mesh, Dirichlet end points included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    nodes: Vec<f64>,
    interface_index: Option<usize>,
}

impl Grid1D {
    pub fn new(nodes: Vec<f64>, interface_index: Option<usize>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::domain(format!(
                "a grid needs at least one interior node, got {} nodes",
                nodes.len()
            )));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("grid nodes must be strictly increasing"));
        }
        Ok(Self {
            nodes,
            interface_index,
        })
    }

    /// The x-grid `x_n = h_- n` (`n < 0`), `x_n = h_+ n` (`n >= 0`),
    /// `n = -N_minus..=N_plus`.
    pub fn from_mesh(mesh: &MeshConfig) -> Self {
        let (nm, np) = (mesh.n_minus(), mesh.n_plus());
        let (hm, hp) = (mesh.h_minus(), mesh.h_plus());
        let mut nodes = Vec::with_capacity(nm + np + 1);
        for k in (1..=nm).rev() {
            nodes.push(-(k as f64) * hm);
        }
        for k in 0..=np {
            nodes.push(k as f64 * hp);
        }
        Self {
            nodes,
            interface_index: Some(nm),
        }
    }

    /// `n` equal cells on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|k| a + k as f64 * h).collect();
        nodes[n] = b;
        Self {
            nodes,
            interface_index: None,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Index of `x = 0` in [`Grid1D::nodes`], if the grid has an interface.
    pub fn interface_index(&self) -> Option<usize> {
        self.interface_index
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn cell(&self, c: usize) -> (f64, f64) {
        (self.nodes[c], self.nodes[c + 1])
    }

    pub fn interior_len(&self) -> usize {
        self.nodes.len() - 2
    }
}
