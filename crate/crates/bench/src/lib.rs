//! Inputs shared by the solver benchmarks.

use altplan_core::{
    expand_jobs, paper_instance, published_selection, Instance, JobList, TestCaseId,
};

/// Jobs of every case-study period under the published selection.
pub fn fixture_job_lists() -> Vec<JobList> {
    let inst = paper_instance();
    let plan = published_selection();
    (1..=8)
        .map(|j| expand_jobs(&inst, &plan, j).expect("case study expands"))
        .collect()
}

/// The case study cut down to `cases` cases and the given periods, small
/// enough for exhaustive enumeration.
pub fn sub_instance(cases: u32, periods: &[u32]) -> Instance {
    let ids: Vec<TestCaseId> = (1..=cases).map(TestCaseId).collect();
    paper_instance()
        .restrict(&ids, periods)
        .expect("ids and periods exist")
}
