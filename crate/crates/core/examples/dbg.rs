use rand::rngs::StdRng;
use rand::SeedableRng;
use zvass_core::gen::*;
fn main() {
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..50 {
        random_linear_system(&mut rng, 3, 3, 3);
    }
    for i in 0..30 {
        let q = random_qsos2(&mut rng, 3, 7);
        println!("{i} {:?} {}", q, q.brute_force());
        if i == 11 {
            for (e, n) in [(Encoding::Binary, "bin"), (Encoding::Unary, "un")] {
                let f = qsos2_to_qslde(&q, e).unwrap().to_formula().unwrap();
                std::fs::write(
                    format!("/tmp/q{n}.smt2"),
                    zvass_core::backend::to_smtlib2(&f),
                )
                .unwrap();
            }
        }
    }
}
