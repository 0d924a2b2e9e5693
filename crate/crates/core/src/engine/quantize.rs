/// TDC code for an output pulse. The counter clock runs `1/a` faster than
/// nominal so that the largest differential output `a · T` spans the full
/// `2^bits` code range.
pub fn quantize_output(t_out: f64, gain: f64, t_window: f64, bits: u32) -> u32 {
    let levels = f64::from(1u32 << bits);
    let full_scale = gain * t_window;
    if !(t_out > 0.0) || !(full_scale > 0.0) {
        return 0;
    }
    let code = (t_out / full_scale * levels).floor();
    code.min(levels - 1.0) as u32
}
