"""Self-hostable data collective for gig workers.

Workers record income and expenses, share stories under explicit audience
controls, and compare themselves against privacy-gated collective
insights; operators export anonymized evidence bundles for policymakers
and advocates.
"""

__version__ = "0.1.0"
