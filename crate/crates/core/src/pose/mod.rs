//! Multi-stable-pose environment: drops, post-grasp transitions and episodes.
//! A single-pose model is the plain bandit setting.

mod episode;
mod model;

pub use episode::{
    eta_for_pose, pose_success_probability, run_episode, run_episode_seeded, Step, Trajectory,
};
pub use model::{FailureRule, Pose, PoseModel, DROP_SUM_TOLERANCE};
