"""Wavelet, EMD and autoencoder denoisers."""

from .autoencoder import AeConfig, AeModel, ae_denoise, ae_train, load_model, save_model
from .emd import ImfSet, emd, emd_denoise
from .wavelet import WaveletCoeffs, dwt, idwt, wavelet_denoise

__all__ = [
    "AeConfig", "AeModel", "ImfSet", "WaveletCoeffs",
    "ae_denoise", "ae_train", "dwt", "emd", "emd_denoise", "idwt",
    "load_model", "save_model", "wavelet_denoise",
]
