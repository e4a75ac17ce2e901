use super::sfr::*;

/// Overflows raised by one `tick`, per timer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Overflows {
    pub timer0: bool,
    pub timer1: bool,
}

/// Advances an up-counter with wrap modulus `modulus`, reloading `reload`
/// on each wrap. Returns the new count and whether it wrapped at least once.
fn advance(count: u32, cycles: u64, modulus: u32, reload: u32) -> (u32, bool) {
    let to_wrap = (modulus - count) as u64;
    if cycles < to_wrap {
        return ((count as u64 + cycles) as u32, false);
    }
    let rest = cycles - to_wrap;
    let period = (modulus - reload) as u64;
    (reload + (rest % period) as u32, true)
}

/// Steps timer 0 and timer 1 by `cycles` machine cycles using the TMOD/TCON
/// contents of `sfr` (indexed by `addr - 0x80`). Only the timer function is
/// modelled: C/T and GATE are ignored, so counters run whenever TRx is set.
pub fn tick(sfr: &mut [u8; 128], cycles: u64) -> Overflows {
    let r = |a: u8| (a - 0x80) as usize;
    let mut out = Overflows::default();
    if cycles == 0 {
        return out;
    }
    let tmod = sfr[r(TMOD)];
    let tcon = sfr[r(TCON)];
    let mode0 = tmod & 0x03;
    let mode1 = (tmod >> 4) & 0x03;

    // Timer 0
    if mode0 == 3 {
        if tcon & TCON_TR0 != 0 {
            let (v, o) = advance(sfr[r(TL0)] as u32, cycles, 256, 0);
            sfr[r(TL0)] = v as u8;
            out.timer0 = o;
        }
        if tcon & TCON_TR1 != 0 {
            let (v, o) = advance(sfr[r(TH0)] as u32, cycles, 256, 0);
            sfr[r(TH0)] = v as u8;
            out.timer1 = o;
        }
    } else if tcon & TCON_TR0 != 0 {
        out.timer0 = tick_one(sfr, r(TL0), r(TH0), mode0, cycles);
    }

    // Timer 1: with timer 0 in mode 3 it free-runs and cannot raise TF1.
    if mode1 != 3 {
        if mode0 == 3 {
            tick_one(sfr, r(TL1), r(TH1), mode1, cycles);
        } else if tcon & TCON_TR1 != 0 {
            out.timer1 = tick_one(sfr, r(TL1), r(TH1), mode1, cycles);
        }
    }

    if out.timer0 {
        sfr[r(TCON)] |= TCON_TF0;
    }
    if out.timer1 {
        sfr[r(TCON)] |= TCON_TF1;
    }
    out
}

fn tick_one(sfr: &mut [u8; 128], tl: usize, th: usize, mode: u8, cycles: u64) -> bool {
    match mode {
        0 => {
            let count = ((sfr[th] as u32) << 5) | (sfr[tl] as u32 & 0x1F);
            let (v, o) = advance(count, cycles, 1 << 13, 0);
            sfr[th] = (v >> 5) as u8;
            sfr[tl] = (sfr[tl] & 0xE0) | (v as u8 & 0x1F);
            o
        }
        1 => {
            let count = ((sfr[th] as u32) << 8) | sfr[tl] as u32;
            let (v, o) = advance(count, cycles, 1 << 16, 0);
            sfr[th] = (v >> 8) as u8;
            sfr[tl] = v as u8;
            o
        }
        2 => {
            let (v, o) = advance(sfr[tl] as u32, cycles, 256, sfr[th] as u32);
            sfr[tl] = v as u8;
            o
        }
        _ => false,
    }
}
