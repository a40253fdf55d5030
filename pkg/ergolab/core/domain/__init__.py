"""Domain values: symbolic points, scales, intervals, measures and reports."""
