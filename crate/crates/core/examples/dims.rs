use wznw_mono::field::FieldMode;
use wznw_mono::zeromodes::FockModule;
fn main() {
    for (n, k, lmax) in [(3usize, 1usize, 6usize), (3, 2, 6)] {
        let t0 = std::time::Instant::now();
        let mode = FieldMode::cyclotomic(n, k);
        let m = FockModule::build(&mode, lmax).unwrap();
        let dims: Vec<usize> = (0..=lmax).map(|l| m.level_count(l)).collect();
        println!("n={n} k={k} lmax={lmax}: dims {dims:?} total {} in {:?}", m.basis_len(), t0.elapsed());
    }
    let t0 = std::time::Instant::now();
    let mode = FieldMode::generic_q(3);
    let m = FockModule::build(&mode, 7).unwrap();
    let dims: Vec<usize> = (0..=7).map(|l| m.level_count(l)).collect();
    println!("n=3 generic lmax=7: dims {dims:?} total {} in {:?}", m.basis_len(), t0.elapsed());
}
