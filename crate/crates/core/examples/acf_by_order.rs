//! Autocorrelation of binomial AR-p processes whose lag-one correlation is
//! fixed at 0.99. Higher orders stay correlated longer at short lags and
//! decorrelate faster at long ones.

use arpex::ar::{acf, alpha_for_rho1, ArModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lags = [1, 10, 50, 100, 300, 600];
    print!("{:>3} {:>10}", "p", "alpha");
    for l in lags {
        print!(" {:>9}", format!("rho_{l}"));
    }
    println!();
    for p in [1, 3, 5] {
        let alpha = alpha_for_rho1(p, 0.99)?;
        let table = acf(&ArModel::binomial(p, alpha)?, 600);
        print!("{p:>3} {alpha:>10.6}");
        for l in lags {
            print!(" {:>9.5}", table.rho[l]);
        }
        println!();
    }
    Ok(())
}
