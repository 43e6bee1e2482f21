#[allow(dead_code)]
#[path = "../examples/orbit_counts.rs"]
mod orbit_counts;
#[allow(dead_code)]
#[path = "../examples/density_table.rs"]
mod density_table;
#[allow(dead_code)]
#[path = "../examples/log_concavity.rs"]
mod log_concavity;
#[allow(dead_code)]
#[path = "../examples/asymptotic_constants.rs"]
mod asymptotic_constants;
#[allow(dead_code)]
#[path = "../examples/hnf_oracle.rs"]
mod hnf_oracle;
#[allow(dead_code)]
#[path = "../examples/ball_counting.rs"]
mod ball_counting;
#[allow(dead_code)]
#[path = "../examples/density_image.rs"]
mod density_image;
#[allow(dead_code)]
#[path = "../examples/verify_suites.rs"]
mod verify_suites;

#[test]
fn examples_run() {
    orbit_counts::run_example().unwrap();
    density_table::run_example().unwrap();
    log_concavity::run_example().unwrap();
    asymptotic_constants::run_example().unwrap();
    hnf_oracle::run_example().unwrap();
    ball_counting::run_example().unwrap();
    density_image::run_example().unwrap();
    verify_suites::run_example().unwrap();
}
