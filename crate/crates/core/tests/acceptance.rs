use stickel_core::verify::{criterion_ids, run_criterion};

fn main() {
    let mut failed = 0;
    let ids = criterion_ids();
    for &id in &ids {
        let r = run_criterion(id, 0).expect("known criterion");
        println!("{}", r.line());
        failed += usize::from(!r.pass);
    }
    println!("{} of {} criteria passed", ids.len() - failed, ids.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
