use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Frame, FrameData, ScalingMap};
use crate::nn::NeuralNet;

/// `D_Y . g . S_r . E_X`: dual-frame analysis in X truncated to the first
/// `input_modes` coefficients, scaling to the unit cube, a coefficient network
/// and synthesis with the first `output_modes` vectors of the Y frame.
#[derive(Clone, Debug)]
pub struct FrameNetModel {
    pub encoder: Frame,
    pub input_modes: usize,
    pub scaling: ScalingMap,
    pub net: NeuralNet,
    pub decoder: Frame,
    pub output_modes: usize,
    pub range_bound: f64,
    /// Certified sup error of the network, when it comes from a construction.
    pub certified_sup_error: Option<f64>,
    pub notes: Vec<(String, f64)>,
}

/// Intermediate values of one application of a [`FrameNetModel`].
#[derive(Clone, Debug, PartialEq)]
pub struct StageOutputs {
    pub encoded: Vec<f64>,
    pub scaled: Vec<f64>,
    pub clamped: bool,
    pub coefficients: Vec<f64>,
    pub output: Vec<f64>,
}

impl FrameNetModel {
    pub fn new(encoder: Frame, scaling: ScalingMap, net: NeuralNet, decoder: Frame, range_bound: f64) -> Result<Self> {
        let input_modes = net.input_dim();
        let output_modes = net.output_dim();
        if input_modes > encoder.len() || input_modes > scaling.len() {
            return Err(Error::input(format!(
                "network reads {input_modes} coefficients but the encoder has {} and the scaling {}",
                encoder.len(),
                scaling.len()
            )));
        }
        if output_modes > decoder.len() {
            return Err(Error::input(format!(
                "network writes {output_modes} coefficients but the decoder has {}",
                decoder.len()
            )));
        }
        Ok(Self {
            encoder,
            input_modes,
            scaling,
            net,
            decoder,
            output_modes,
            range_bound,
            certified_sup_error: None,
            notes: Vec::new(),
        })
    }

    /// Truncated dual-frame coefficients of `x`.
    pub fn encode(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut c = self.encoder.dual()?.analysis(x)?;
        c.truncate(self.input_modes);
        Ok(c)
    }

    /// Element of Y with the given leading frame coefficients.
    pub fn decode(&self, c: &[f64]) -> Result<Vec<f64>> {
        self.decoder.synthesis(c)
    }

    /// Network output (Y frame coefficients) for an input element of X.
    pub fn coefficients(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.stages(x)?.coefficients)
    }

    pub fn stages(&self, x: &[f64]) -> Result<StageOutputs> {
        let encoded = self.encode(x)?;
        let s = self.scaling.scale(&encoded)?;
        let coefficients = self.net.eval(&s.values)?;
        let output = self.decode(&coefficients)?;
        Ok(StageOutputs { encoded, scaled: s.values, clamped: s.clamped, coefficients, output })
    }

    /// The model applied to `x`, in Y reference coordinates.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.stages(x)?.output)
    }

    /// Range check of the network on `[-1, 1]^{p_0}` with a 5% safety margin
    /// on the sampled estimate.
    pub fn check_range(&self, samples: usize, seed: u64) -> Result<f64> {
        let est = self.net.mran_estimate(samples, seed);
        if est * 1.05 > self.range_bound {
            return Err(Error::Verification(format!(
                "estimated range {est:.4e} (with margin) exceeds the bound {:.4e}",
                self.range_bound
            )));
        }
        Ok(est)
    }

    pub fn to_data(&self) -> ModelData {
        ModelData {
            encoder: self.encoder.to_data(),
            input_modes: self.input_modes,
            scaling: self.scaling.clone(),
            net: self.net.clone(),
            decoder: self.decoder.to_data(),
            output_modes: self.output_modes,
            range_bound: self.range_bound,
            certified_sup_error: self.certified_sup_error,
            notes: self.notes.clone(),
        }
    }

    pub fn from_data(data: ModelData) -> Result<Self> {
        let mut m = Self::new(
            Frame::from_data(&data.encoder)?,
            data.scaling,
            data.net,
            Frame::from_data(&data.decoder)?,
            data.range_bound,
        )?;
        if m.input_modes != data.input_modes || m.output_modes != data.output_modes {
            return Err(Error::input("stored truncations disagree with the network dimensions"));
        }
        m.certified_sup_error = data.certified_sup_error;
        m.notes = data.notes;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.to_data())?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let data: ModelData = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::input(format!("{}: {}", e.path(), e.inner())))?;
        Self::from_data(data)
    }
}

/// JSON bundle of a [`FrameNetModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelData {
    pub encoder: FrameData,
    pub input_modes: usize,
    pub scaling: ScalingMap,
    pub net: NeuralNet,
    pub decoder: FrameData,
    pub output_modes: usize,
    pub range_bound: f64,
    #[serde(default)]
    pub certified_sup_error: Option<f64>,
    #[serde(default)]
    pub notes: Vec<(String, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SmoothnessWeights;
    use crate::nn::{identity_net, Activation};

    fn unit_scaling(k: usize) -> ScalingMap {
        ScalingMap::new(1.0, 1.0, SmoothnessWeights::new(vec![1.0; k]).unwrap()).unwrap()
    }

    #[test]
    fn zero_net_gives_zero() {
        let net = NeuralNet::zeros_dense(&[3, 4, 2], Activation::Relu).unwrap();
        let m = FrameNetModel::new(Frame::identity(3), unit_scaling(3), net, Frame::identity(5), 1.0).unwrap();
        assert_eq!(m.apply(&[0.3, -0.2, 0.9]).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn identity_pipeline_clamps() {
        let net = identity_net(3, 1, Activation::Relu).unwrap();
        let m = FrameNetModel::new(Frame::identity(3), unit_scaling(3), net, Frame::identity(3), 2.0).unwrap();
        let s = m.stages(&[0.5, -1.5, 0.25]).unwrap();
        assert!(s.clamped);
        assert_eq!(s.output, vec![0.5, -1.0, 0.25]);
    }

    #[test]
    fn manual_composition_is_bitwise_equal() {
        let net = NeuralNet::zeros_dense(&[2, 3, 2], Activation::Relu).unwrap();
        let mut p = net.params();
        for (i, v) in p.iter_mut().enumerate() {
            *v = ((i * 7 % 11) as f64 - 5.0) / 7.0;
        }
        let mut net = net;
        net.set_params(&p).unwrap();
        let enc = Frame::from_columns(3, &[vec![1.0, 0.2, 0.0], vec![0.0, 1.0, 0.3], vec![0.1, 0.0, 1.0]]).unwrap();
        let dec = Frame::from_columns(2, &[vec![1.0, 1.0], vec![1.0, -1.0], vec![0.5, 0.0]]).unwrap();
        let scaling = ScalingMap::new(2.0, 1.0, SmoothnessWeights::new(vec![1.0, 0.5, 0.25]).unwrap()).unwrap();
        let m = FrameNetModel::new(enc.clone(), scaling.clone(), net.clone(), dec.clone(), 5.0).unwrap();
        let x = [0.3, -0.4, 0.2];
        let mut c = enc.dual().unwrap().analysis(&x).unwrap();
        c.truncate(2);
        let u = scaling.scale(&c).unwrap().values;
        let g = net.eval(&u).unwrap();
        let manual = dec.synthesis(&g).unwrap();
        assert_eq!(m.apply(&x).unwrap(), manual);
    }

    #[test]
    fn json_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let net = identity_net(2, 1, Activation::Relu).unwrap();
        let mut m = FrameNetModel::new(Frame::identity(2), unit_scaling(2), net, Frame::identity(2), 2.0).unwrap();
        m.certified_sup_error = Some(1e-3);
        let path = dir.path().join("model.json");
        m.save(&path).unwrap();
        let back = FrameNetModel::load(&path).unwrap();
        assert_eq!(back.to_data(), m.to_data());
        assert_eq!(back.apply(&[0.1, 0.2]).unwrap(), m.apply(&[0.1, 0.2]).unwrap());
    }
}
