//! Build all six prompting strategies for one sentence/graph pair.
//!
//! Run with: cargo run -p amrsplit --example build_prompts

use amrsplit::{build, extract_elements, parse, split, PromptInputs, SplitConfig, Strategy};

const SENTENCE: &str =
    "In 1935 they moved to 24 West Chaldon, as the cottage was known to Miss Green.";

const SOURCE: &str = "(m / move-01 :time (d / date-entity :year 1935) :ARG0 (t / they) \
 :purpose (lv / live-01 :ARG0 t :location (c / city :name (cn / name :op1 \"Chaldon\")) :time d) \
 :ARG2 (loc / location :name (ln / name :op1 \"24\" :op2 \"West\" :op3 \"Chaldon\") \
 :ARG1-of (k / know-02 :ARG2 (kn / name :op1 \"Miss\" :op2 \"Green\"))))";

fn main() {
    let graph = parse(SOURCE).expect("well-formed sample");
    // Each strategy needs at most one derived artifact; provide them all and
    // let `build` pick what it uses.
    let split_result = split(&graph, SplitConfig::default()).unwrap();
    let elements = extract_elements(&graph);
    let inputs = PromptInputs {
        graph: Some(&graph),
        split: Some(&split_result),
        elements: Some(&elements),
    };

    for strategy in Strategy::ALL {
        let payload = build(strategy, SENTENCE, &inputs).expect("all artifacts provided");
        println!("================ {} ================", strategy); // Display form
        for message in payload.messages() {
            println!("--- {} message ---", message.role);
            println!("{}", message.content);
        }
        println!();
    }
}
