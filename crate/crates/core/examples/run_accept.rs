use strsem_core::accept::{run_all, Bounds, Status};
fn main() {
    let bounds = Bounds::default();
    let start = std::time::Instant::now();
    for check in run_all(&bounds) {
        let t = std::time::Instant::now();
        let _ = t;
        println!(
            "{} {} - {}",
            match check.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            },
            check.name,
            check.details
        );
    }
    println!("total: {:?}", start.elapsed());
}
