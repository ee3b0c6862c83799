// scratch calibration probe; removed before release
use alfcg::data_io::generate_synthetic;
use alfcg::{FeasibleSet, LossKind, Objective, SolverConfig, Variant, Vector};

fn main() {
    for ds_seed in [1u64, 2, 3, 7, 11] {
        let ds = generate_synthetic(200, 50, 5, ds_seed).unwrap();
        let obj = Objective::new(LossKind::MultinomialLogistic, ds.into(), 0.0).unwrap();
        let set = FeasibleSet::nuclear_ball(10.0, 5, 50).unwrap();
        let mut cfg = SolverConfig::new(Variant::D);
        cfg.max_iters = 5000;
        cfg.eval_every = 1;
        let out = alfcg::run(&cfg, &obj, &set, &Vector::zeros(250)).unwrap();
        let g0 = out.trace[0].gap.unwrap();
        let min_t = out
            .trace
            .iter()
            .min_by(|a, b| a.gap.unwrap().partial_cmp(&b.gap.unwrap()).unwrap())
            .unwrap();
        println!(
            "seed {ds_seed}: gap0 = {g0:.4e}, min gap = {:.4e} at t = {}, ratio = {:.2}",
            min_t.gap.unwrap(),
            min_t.t,
            g0 / min_t.gap.unwrap()
        );
    }
}
