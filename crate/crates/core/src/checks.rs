//! Analytic sanity checks (Kloosterman sums, Petersson off-diagonals,
//! mollifier diagonals). Implemented in later commits.
