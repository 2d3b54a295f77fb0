use qsanov::geometry::*;
use qsanov::optimizer::*;
use std::time::Instant;

fn main() {
    let region = HalfspaceRegion::less_equal(vec![1.0, -1.25, 0.0], 0.0).unwrap();
    let n = 1_000_000u64;
    let expanded = expand_region(&region, n).unwrap();
    for delta in [0.5, 0.1, 0.01, 0.001, 1e-4, 1e-5, 1e-6, 1e-7] {
        let a = HalfspaceRegion::at_least(vec![1.0, -1.25, 0.0], delta).unwrap();
        let t0 = Instant::now();
        let res = min_kl_between_regions(&a, InnerRegion::Halfspace(&expanded), n, 1e-10).unwrap();
        println!("delta={delta:.1e}: D={:.6e} iters={} conv={} [{:?}]", res.divergence, res.iterations, res.converged, t0.elapsed());
    }
}
