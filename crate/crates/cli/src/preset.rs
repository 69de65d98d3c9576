/// Built-in accelerator configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub m: u32,
    pub n: u32,
    pub fc: f64,
    pub fs: f64,
    pub filter: &'static str,
    pub decimate: usize,
    /// Default low-pass bandwidth in Hz, used with `--preset-lp`.
    pub lp_hz: Option<f64>,
    pub lp_range_hz: Option<(f64, f64)>,
}

pub const PRESETS: [Preset; 2] = [
    Preset {
        name: "lcls2",
        description: "LCLS-II, non-IQ sampling 7/33",
        m: 7,
        n: 33,
        fc: 20e6,
        fs: 94.29e6,
        filter: "2sr",
        decimate: 1,
        lp_hz: Some(100e3),
        lp_range_hz: Some((50e3, 200e3)),
    },
    Preset {
        name: "ess",
        description: "ESS, non-IQ sampling 3/14",
        m: 3,
        n: 14,
        fc: 25.16e6,
        fs: 117.40e6,
        filter: "ma:14",
        decimate: 14,
        lp_hz: None,
        lp_range_hz: None,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

impl Preset {
    /// Settings in the `--config` file grammar.
    pub fn settings(&self) -> Vec<(&'static str, String)> {
        vec![
            ("carrier", format!("{}/{}", self.m, self.n)),
            ("fs", self.fs.to_string()),
            ("filter", self.filter.to_string()),
            ("decimate", self.decimate.to_string()),
        ]
    }

    /// Listing for `preset show`, loadable with `--config`.
    pub fn render(&self) -> String {
        let mut s = format!("# {}: {}\n# fc={} Hz\n", self.name, self.description, self.fc);
        for (k, v) in self.settings() {
            s += &format!("{k}={v}\n");
        }
        if let (Some(lp), Some((lo, hi))) = (self.lp_hz, self.lp_range_hz) {
            s += &format!("# lp-hz={lp} with --preset-lp (range {lo}-{hi} Hz)\n");
        }
        s
    }
}
