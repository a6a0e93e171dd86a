fn main() {
    let r = lln_lab::quad::integrate_tail(|x: f64| 1.0 / x, 1.0, 1e-8);
    println!("{r:?}");
}
