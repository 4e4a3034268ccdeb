"""Wavelet transforms: plain separable DWT and the dual-tree complex wavelet transform."""
