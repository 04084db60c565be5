use s5seq::hypersequent::parse_sequent;
use s5seq::search::{prove, SearchBudget, SearchVerdict};

fn main() {
    for text in [
        "=> []([]~p | p) -> [](~p | []p)",
        "[]([]~p | p) => [](~p | []p)",
        "[]~p | p, []([]~p | p) => [](~p | []p)",
        "p, []([]~p | p) => [](~p | []p)",
        "[]([]~p | p) => ~p | []p || p =>",
        "p, []([]~p | p) => []p || p =>",
    ] {
        let goal = parse_sequent(text).unwrap();
        let v = prove(&goal, SearchBudget::default());
        let tag = match &v {
            SearchVerdict::Provable(_) => "PROVABLE",
            SearchVerdict::NotProvable { saturated_states } => {
                println!("  saturated: {saturated_states}");
                "NOT PROVABLE"
            }
            SearchVerdict::BudgetExceeded => "BUDGET",
        };
        println!("{tag}: {text}");
    }
}
