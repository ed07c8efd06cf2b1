//! Builds a multi-bit point function, evaluates it, round-trips the netlist
//! and compiles it to a reversible circuit.

use qvbb_lab::bits;
use qvbb_lab::circuit_ir::{build_function, compile_reversible, BooleanCircuit, FunctionSpec};

fn main() {
    let target = bits::from_str01("101101");
    let payload = bits::from_str01("011001");
    let c = build_function(&FunctionSpec::multibit_point(&target, &payload));
    println!("point function: {} gates, depth {}", c.gates().len(), c.depth());
    println!("f(target) = {}", bits::to_str01(&c.eval(&target).unwrap()));
    println!("f(000000) = {}", bits::to_str01(&c.eval(&[false; 6]).unwrap()));

    let back = BooleanCircuit::from_netlist(&c.to_netlist()).unwrap();
    assert_eq!(back, c);

    let r = compile_reversible(&c);
    println!("reversible form: {} wires, {} gates", r.n_wires, r.gates.len());
}
