//! Reading and writing images and kernel files.

use rgtv::eval::io::{format_kernel, read_image, read_kernel, write_image_pair, write_kernel};
use rgtv::eval::synth::pws_image;
use rgtv::BlurKernel;

fn main() -> rgtv::Result<()> {
    let dir = std::env::temp_dir().join("rgtv-io-example");
    std::fs::create_dir_all(&dir)?;

    let img = pws_image(48, 32, 4);
    let (png, pgm) = write_image_pair(dir.join("sample.png"), &img)?;
    let back = read_image(&pgm)?;
    println!("wrote {} and {}", png.display(), pgm.display());
    println!("8-bit round trip RMSE {:.5}", back.mse(&img)?.sqrt());

    let k = BlurKernel::gaussian(3, 0.8)?;
    write_kernel(dir.join("k.txt"), &k)?;
    print!("{}", format_kernel(&k));
    assert_eq!(read_kernel(dir.join("k.txt"))?, k);
    Ok(())
}
