class IfsDensityException(Exception):

    def __init__(self, msg = "Unknown ifs-density exception", context = None):
        self.msg = msg
        self.context = context

    def __str__(self):
        if self.context is None:
            return f"IFS density exception: '{self.msg}'"
        return f"IFS density exception: '{self.msg}' ({self.context})"


class DomainError(IfsDensityException):
    def __init__(self, msg = "Argument outside of the domain.", context = None):
        super().__init__(msg = msg, context = context)


class ConfigurationError(IfsDensityException):
    def __init__(self, msg = "Invalid configuration.", context = None):
        super().__init__(msg = msg, context = context)


class UnsupportedConfiguration(ConfigurationError):
    """ A valid configuration that the operation cannot handle (e.g. epsilon = 0 in the operators)"""
    def __init__(self, msg = "Unsupported configuration.", context = None):
        super().__init__(msg = msg, context = context)


class PreconditionError(IfsDensityException):

    def __init__(self, msg = "Precondition not met.", context = None, threshold = None):
        super().__init__(msg = msg, context = context)
        self.threshold = threshold

    def __str__(self):
        s = super().__str__()
        if self.threshold is not None:
            s += f" - threshold: {self.threshold!r}"
        return s


class VerificationFailure(IfsDensityException):

    def __init__(self, msg = "Verification failed.", failed_checks = None):
        super().__init__(msg = msg, context = None)
        self.failed_checks = failed_checks or []

    def __str__(self):
        return f"IFS density verification failure: '{self.msg}' - failed checks: {', '.join(self.failed_checks)}"
