"""defcert: verification workbench for deformation-ring certificates.

Subpackages cover exact coefficient rings (coeff), quiver presentations and
noncommutative rewriting (quiver), finite-dimensional module theory (fdmod),
a metabelian group family with cohomology (groups), lift and obstruction
verification with scenario reports (deform), and the command line (cli).
"""

__version__ = "0.1.0"
