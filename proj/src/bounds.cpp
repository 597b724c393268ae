namespace ppv {}
