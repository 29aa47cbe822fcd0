"""
A gap certificate
=================

Putting the pieces together: gap(H) >= gamma_Y (1 - 3 eps_n) / 2. Here
gamma_Y is supplied to keep the script fast; drop the argument to have it
computed by Lanczos on the Y-graph.
"""

from gapcert.certificate import certify, render_report

cert = certify(3, gamma=0.2966)
print(render_report(cert, "text"))

# n = 1 is rejected, with the reason spelled out
bad = certify(1, gamma=0.2966)
print("n = 1 valid:", bad.valid)
print("reason:", bad.invalid_reason)
