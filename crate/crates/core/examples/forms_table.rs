//! Hodge star table on R^3 and the vector-calculus identities written with forms.

use locon::forms3::{cross_via_forms, dot_via_forms, identity_residuals, star_table, DEFAULT_H};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<14} *form", "form");
    for row in star_table() {
        println!("{:<14} {}", row.input, row.output);
    }

    let (v, w) = ([1.0, 2.0, 3.0], [-0.5, 4.0, 0.25]);
    println!("\nv x w via *(v^ ^ w^) = {:?}", cross_via_forms(v, w));
    println!("v . w via *(v^ ^ *w^) = {}", dot_via_forms(v, w));

    let r = identity_residuals(200, 7, DEFAULT_H)?;
    println!("\nresiduals over {} random samples:", r.samples);
    println!("  ** = id          {:.2e}", r.star_star_max);
    println!("  cross product    {:.2e}", r.cross_product_max);
    println!("  scalar product   {:.2e}", r.scalar_product_max);
    println!("  curl grad = 0    {:.2e}", r.curl_grad_max);
    println!("  div curl = 0     {:.2e}", r.div_curl_max);
    Ok(())
}
