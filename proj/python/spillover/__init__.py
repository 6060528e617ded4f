"""Correlation, cointegration and connectedness analysis of multivariate time series."""

from ._core import (
    ConnectednessReport,
    DataError,
    DescriptiveStats,
    DynamicConnectedness,
    Error,
    FevdTable,
    NumericalError,
    Panel,
    ParameterError,
    TestResult,
    TvpTrajectory,
    VarModel,
    adf_test,
    align,
    chow_test,
    cholesky_fevd,
    connectedness,
    correlation,
    cumulative_return,
    describe,
    dynamic_connectedness,
    engle_granger,
    export_network,
    fevd_from_shares,
    first_difference,
    fit_var,
    gfevd,
    jarque_bera,
    ljung_box_squared,
    load_csv,
    run_pipeline,
    select_lag,
    tvp_filter,
)

__all__ = [name for name in dir() if not name.startswith("_")]
