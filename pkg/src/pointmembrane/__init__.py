"""Point-constrained near-spherical membranes and the derivative of their energy
with respect to rigid motions of attached particles."""
from .geometry import ModelParams, closest_point, shape_operators, tangent_basis
from .particles import (MotionParam, Particle, apply_motion, check_feasible, load_particles,
                        motion_velocity, rotate_about_normal, translate_tangential)
from .mesh import (SurfaceMesh, build_icosphere, interpolate, locate_on_mesh, mesh_size,
                   nearest_vertex, write_obj, write_vtk)
from .fem import (MembraneSolution, assemble, bilinear_form, discrete_energy, element_gradient,
                  point_operator, solve_membrane)
from .fields import curl_field, rotation_field, smooth_cutoff, strain_tensor
from .derivative import (DerivativeReport, config_energy, config_gradient,
                         derivative_functional, difference_quotient)

__version__ = "0.1.0"
