"""Closed-form theory: series, quadrature, moments and correlation functions."""

from .quadrature import QuadratureError, integrate
from .series import g1, g2, g3, g_integral, g_series, series_bracket
from .formulas import (
    BASELINE_KINDS,
    MONDRIAN_KINDS,
    PCF_KINDS,
    PcfCurve,
    ModelParams,
    RectMoments,
    baseline_pcf,
    edge_count_intensity,
    edge_length_intensity,
    k_from_pcf,
    moments_rect,
    pcf,
    pcf_cross,
    pcf_curve,
    pcf_edge,
    pcf_vertex,
    point_intersection_measure,
    variance_asymptotics,
    vertex_intensity,
)
from .auxiliary import I_closed, I_tail, segment_pair_overlap
