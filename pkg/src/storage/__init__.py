from .report_files import ReportFileCreator, result_payload
__all__ = ['ReportFileCreator', 'result_payload']
