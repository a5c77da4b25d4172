"""Stratification geometry and chart comparison for RO(G)-graded slice spectral sequences."""

from .chart import (Chart, CellPage, Differential, FgaGroup, LevelMap, PageView, Window, differential,
                    e2_view, euler_check, run_to_page, turn_page, unit_differential, validate_chart)
from .comparison import (ChartMap, IsomReport, Propagation, TowerReport, check_isom_on_line, compose,
                         identity_map, propagate_differentials, tower_assemble, transfer_kernel_check,
                         validate_map)
from .diagnostics import (ChartError, ComparisonError, Diagnostic, FamilyError, GeometryError, GroupError,
                          RepError, SliceStratError)
from .families import (Family, extremal_orders, family_difference, family_from_members, fiber_support,
                       non_containing_family, order_family, order_family_chain, tau)
from .geometry import (Bidegree, Line, Region, comparison_region, contains, cone_lines, e2_iso_exact,
                       line_LHV, line_Lh, positive_cone, recovery_region, strata, vanishing_bounds)
from .groups import (GroupDescriptor, SubgroupClass, builtin_cyclic, builtin_group, builtin_quaternion8,
                     make_group, validate_group)
from .render import RenderSpec, render_svg
from .reps import (Irreducible, IrreducibleTable, VirtualRep, builtin_table, fixed_dim, k_of, parse_rep,
                   regular_rep, total_dim, validate_table, vrep)

__version__ = "0.1.0"
