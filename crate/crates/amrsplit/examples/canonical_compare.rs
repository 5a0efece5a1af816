//! Compare graphs for isomorphism using the canonical form: same canonical
//! text means same graph up to variable renaming and edge order.
//!
//! Run with: cargo run -p amrsplit --example canonical_compare

use amrsplit::{canonical_form, parse};

fn main() {
    // The same meaning written three different ways: different variable
    // names, different edge order, different whitespace.
    let first = parse("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))").unwrap();
    let second = parse(
        "(x1 / want-01
            :ARG1 (x2 / go-02 :ARG0 (x3 / boy))
            :ARG0 x3)",
    )
    .unwrap();
    // A genuinely different graph: the girl wants to go.
    let third = parse("(w / want-01 :ARG0 (g2 / girl) :ARG1 (g / go-02 :ARG0 g2))").unwrap();

    let canon_first = canonical_form(&first).unwrap();
    let canon_second = canonical_form(&second).unwrap();
    let canon_third = canonical_form(&third).unwrap();

    println!("first : {canon_first}");
    println!("second: {canon_second}");
    println!("third : {canon_third}\n");

    println!("first == second (isomorphic)   : {}", canon_first == canon_second);
    println!("first == third  (different boy): {}", canon_first == canon_third);
}
