//! Strongly connected components and their cycle classification.

use std::collections::BTreeSet;

use crate::automaton::{Automaton, StateId};

/// Shape of a strongly connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// A single state without a self-loop.
    Trivial,
    /// Every state has exactly one transition staying in the component, so the
    /// component is one directed cycle (a self-loop for singletons).
    SingleCycle,
    /// Some state has two or more transitions staying in the component.
    Tangled,
}

/// Condensation of an automaton's transition graph.
///
/// Components are numbered in the order Tarjan's algorithm completes them,
/// which is a reverse topological order of the condensation: every DAG edge
/// `(c, d)` has `c > d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccDecomposition {
    component_of: Vec<usize>,
    components: Vec<Vec<StateId>>,
    dag_edges: BTreeSet<(usize, usize)>,
    shapes: Vec<Shape>,
}

impl SccDecomposition {
    pub fn component_of(&self, q: StateId) -> usize {
        self.component_of[q]
    }

    pub fn components(&self) -> &[Vec<StateId>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dag_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.dag_edges
    }

    pub fn shape(&self, c: usize) -> Shape {
        self.shapes[c]
    }

    pub fn is_single_cycle(&self, c: usize) -> bool {
        self.shapes[c] == Shape::SingleCycle
    }

    /// Whether `q` lies on some cycle of the automaton.
    pub fn on_cycle(&self, q: StateId) -> bool {
        self.shapes[self.component_of[q]] != Shape::Trivial
    }

    /// True iff no component is [`Shape::Tangled`].
    pub fn all_single_cycles(&self) -> bool {
        self.shapes.iter().all(|&s| s != Shape::Tangled)
    }
}

const UNVISITED: usize = usize::MAX;

/// Iterative Tarjan over the transition graph (symbols are ignored; parallel
/// edges are kept for the shape count).
pub fn scc(aut: &Automaton) -> SccDecomposition {
    let n = aut.n_states();
    let succ: Vec<Vec<StateId>> = aut
        .states()
        .map(|q| {
            aut.alphabet()
                .symbols()
                .flat_map(|x| aut.successors(q, x).iter().copied())
                .collect()
        })
        .collect();

    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component_of = vec![UNVISITED; n];
    let mut components: Vec<Vec<StateId>> = Vec::new();
    let mut counter = 0;
    // call frames: (vertex, next edge position)
    let mut frames: Vec<(StateId, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let id = components.len();
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component_of[w] = id;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }

    let mut dag_edges = BTreeSet::new();
    for (v, targets) in succ.iter().enumerate() {
        for &w in targets {
            let (c, d) = (component_of[v], component_of[w]);
            if c != d {
                dag_edges.insert((c, d));
            }
        }
    }
    let shapes = components
        .iter()
        .enumerate()
        .map(|(c, comp)| {
            let inner: Vec<usize> = comp
                .iter()
                .map(|&q| succ[q].iter().filter(|&&w| component_of[w] == c).count())
                .collect();
            if inner.iter().any(|&k| k > 1) {
                Shape::Tangled
            } else if inner.iter().all(|&k| k == 1) {
                Shape::SingleCycle
            } else {
                // only a singleton can have a state without an inner edge
                Shape::Trivial
            }
        })
        .collect();

    SccDecomposition {
        component_of,
        components,
        dag_edges,
        shapes,
    }
}
