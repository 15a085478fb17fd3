//! Worked instances and random generators.
//!
//! Names follow the 1-based labels used in the literature (tasks A..E,
//! sets S1..S6, vertices 1..6); the instances themselves are 0-indexed.

use rand::Rng;

use super::ProblemInstance;

/// Edge indicator of [`vertex_cover_six`] over the 15 lexicographic slots
/// `1-2, 1-3, ..., 5-6`.
pub const VERTEX_COVER_SIX_SLOTS: &str = "000100100110101";

/// S1={a1,a3}, S2={a2}, S3={a4,a5}, S4={a2,a5,a6}. Optimum: S1, S2, S3.
pub fn set_packing_four_subsets() -> ProblemInstance {
    ProblemInstance::set_packing(6, vec![vec![0, 2], vec![1], vec![3, 4], vec![1, 4, 5]]).expect("valid instance")
}

/// The four-subset instance extended with S5={a5,a8}, S6={a6,a7} over eight elements.
pub fn set_packing_six_subsets() -> ProblemInstance {
    ProblemInstance::set_packing(
        8,
        vec![vec![0, 2], vec![1], vec![3, 4], vec![1, 4, 5], vec![4, 7], vec![5, 6]],
    )
    .expect("valid instance")
}

/// Two processors, tasks A..E with times 3, 4, 8, 2, 5.
pub fn scheduling_five_tasks() -> ProblemInstance {
    ProblemInstance::scheduling(2, vec![3.0, 4.0, 8.0, 2.0, 5.0], vec![], vec![]).expect("valid instance")
}

/// [`scheduling_five_tasks`] with C and D forbidden from sharing a processor.
pub fn scheduling_five_tasks_conflict() -> ProblemInstance {
    ProblemInstance::scheduling(2, vec![3.0, 4.0, 8.0, 2.0, 5.0], vec![[2, 3]], vec![]).expect("valid instance")
}

/// Tasks A, B, C on two processors with B and C in conflict; unit times.
pub fn scheduling_three_tasks_conflict() -> ProblemInstance {
    ProblemInstance::scheduling(2, vec![1.0; 3], vec![[1, 2]], vec![]).expect("valid instance")
}

/// Six-vertex graph decoded from [`VERTEX_COVER_SIX_SLOTS`]:
/// edges 1-5, 2-4, 3-4, 3-5, 4-5, 5-6. Unique minimum cover {4, 5}.
pub fn vertex_cover_six() -> ProblemInstance {
    ProblemInstance::vertex_cover_from_slots(6, VERTEX_COVER_SIX_SLOTS).expect("valid instance")
}

/// Erdos-Renyi graph partition instance.
pub fn random_graph_partition<R: Rng + ?Sized>(n: usize, edge_probability: f64, rng: &mut R) -> ProblemInstance {
    let edges = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| [u, v]))
        .filter(|_| rng.random_bool(edge_probability))
        .collect();
    ProblemInstance::graph_partition(n, edges).expect("valid instance")
}

/// Conflict-free scheduling instance with integer task times in `1..=9`.
pub fn random_scheduling<R: Rng + ?Sized>(processors: usize, tasks: usize, rng: &mut R) -> ProblemInstance {
    let times = (0..tasks).map(|_| rng.random_range(1..=9) as f64).collect();
    ProblemInstance::scheduling(processors, times, vec![], vec![]).expect("valid instance")
}
