//! Generates a random instance and prints it as JSON.

use reserve_match::gen::{generate, GenParams};
use reserve_match::io::instance_to_json;

fn main() -> reserve_match::Result<()> {
    let mut params = GenParams::new(12, 2, 2, 7);
    params.capacity = Some(5);
    print!("{}", instance_to_json(&generate(&params)?)?);
    Ok(())
}
